#include "auvnav/trajectory.hpp"

#include <cmath>
#include <stdexcept>

#include "auvnav/geo.hpp"
#include "auvnav/strapdown.hpp"

namespace auvnav {

namespace {

constexpr double kLat0 = 32.0 * M_PI / 180.0;
constexpr double kLon0 = 34.0 * M_PI / 180.0;
constexpr double kDepth0 = 5.0;

Eigen::Quaterniond yaw_quat(double psi) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(psi, Eigen::Vector3d::UnitZ()));
}

// Heading profile of a lawnmower pattern: straight legs joined by 180-degree
// turns with raised-cosine rate bumps, alternating direction. The bump keeps
// the profile C^2 so synthesized specific force is continuous.
struct LawnmowerProfile {
  double leg = 60.0;   // s
  double turn = 20.0;  // s
  double psi0 = 0.0;

  double rate(double t) const {
    const double period = leg + turn;
    const double k = std::floor(t / period);
    const double tau = t - k * period;
    if (tau < leg) return 0.0;
    const double tt = tau - leg;
    const double sign = (static_cast<long>(k) % 2 == 0) ? 1.0 : -1.0;
    return sign * (M_PI / turn) * (1.0 - std::cos(2.0 * M_PI * tt / turn));
  }

  double angle(double t) const {
    const double period = leg + turn;
    const double k = std::floor(t / period);
    const double tau = t - k * period;
    // completed turns alternate +pi, -pi
    double psi = psi0 + ((static_cast<long>(k) % 2 == 1) ? M_PI : 0.0);
    if (tau <= leg) return psi;
    const double tt = tau - leg;
    const double sign = (static_cast<long>(k) % 2 == 0) ? 1.0 : -1.0;
    return psi + sign * (M_PI / turn) *
                     (tt - turn / (2.0 * M_PI) * std::sin(2.0 * M_PI * tt / turn));
  }
};

AnalyticTrajectory planar(std::string id, double duration, double speed,
                          std::function<double(double)> psi,
                          std::function<double(double)> psi_dot) {
  AnalyticTrajectory traj;
  traj.id = std::move(id);
  traj.duration = duration;
  traj.speed = speed;
  traj.lat0 = kLat0;
  traj.lon0 = kLon0;
  traj.depth0 = kDepth0;
  traj.heading = std::move(psi);
  traj.heading_rate = std::move(psi_dot);
  return traj;
}

}  // namespace

Eigen::Vector3d AnalyticTrajectory::velocity_ned(double t) const {
  const double psi = heading(t);
  return {speed * std::cos(psi), speed * std::sin(psi), 0.0};
}

Eigen::Vector3d AnalyticTrajectory::accel_ned(double t) const {
  const double psi = heading(t);
  const double rate = heading_rate(t);
  return {-speed * rate * std::sin(psi), speed * rate * std::cos(psi), 0.0};
}

Eigen::Vector3d AnalyticTrajectory::body_rate(double t) const {
  return {0.0, 0.0, heading_rate(t)};
}

Eigen::Quaterniond AnalyticTrajectory::attitude(double t) const {
  return yaw_quat(heading(t));
}

NavState AnalyticTrajectory::initial_state() const {
  NavState s;
  s.lat = lat0;
  s.lon = lon0;
  s.depth = depth0;
  s.v_n = velocity_ned(0.0);
  s.q_bn = attitude(0.0);
  return s;
}

AnalyticTrajectory make_straight_line(double duration) {
  const double psi0 = deg2rad(30.0);
  return planar("straight-line", duration, 1.2,
                [psi0](double) { return psi0; }, [](double) { return 0.0; });
}

AnalyticTrajectory make_sinusoidal_heading(double duration) {
  const double base = 0.3, amp = 0.7, period = 80.0;
  return planar(
      "sinusoidal-heading", duration, 1.5,
      [=](double t) { return base + amp * std::sin(2.0 * M_PI * t / period); },
      [=](double t) {
        return amp * 2.0 * M_PI / period * std::cos(2.0 * M_PI * t / period);
      });
}

AnalyticTrajectory make_lawnmower(double duration) {
  LawnmowerProfile p;
  return planar("lawnmower", duration, 1.0,
                [p](double t) { return p.angle(t); },
                [p](double t) { return p.rate(t); });
}

AnalyticTrajectory make_spiral_turn(double duration) {
  // turn rate decays linearly, so the radius grows over the run
  const double w_hi = 0.12, w_lo = 0.02;
  const double slope = (w_hi - w_lo) / duration;
  return planar(
      "spiral-turn", duration, 1.8,
      [=](double t) { return w_hi * t - 0.5 * slope * t * t; },
      [=](double t) { return w_hi - slope * t; });
}

AnalyticTrajectory make_eval_lawnmower(double duration) {
  LawnmowerProfile p;
  p.leg = 45.0;
  p.turn = 15.0;
  p.psi0 = 0.0;
  auto traj = planar("eval-lawnmower", duration, 1.0,
                     [p](double t) { return p.angle(t); },
                     [p](double t) { return p.rate(t); });
  return traj;
}

std::vector<AnalyticTrajectory> baseline_trajectories(double duration) {
  return {make_straight_line(duration), make_sinusoidal_heading(duration),
          make_lawnmower(duration), make_spiral_turn(duration)};
}

AnalyticTrajectory trajectory_by_id(const std::string& id, double duration) {
  if (id == "straight-line") return make_straight_line(duration);
  if (id == "sinusoidal-heading") return make_sinusoidal_heading(duration);
  if (id == "lawnmower") return make_lawnmower(duration);
  if (id == "spiral-turn") return make_spiral_turn(duration);
  if (id == "eval-lawnmower") return make_eval_lawnmower(duration);
  throw std::invalid_argument("unknown trajectory id: " + id);
}

SyntheticTruth inverse_mechanize(const AnalyticTrajectory& traj,
                                 double rate_hz) {
  if (!(rate_hz > 0.0)) {
    throw std::invalid_argument("inverse_mechanize: rate must be positive");
  }
  if (traj.speed > 3.0) {
    throw std::invalid_argument("inverse_mechanize: speed exceeds 3 m/s");
  }
  const double dt = 1.0 / rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(traj.duration * rate_hz));
  const double g = normal_gravity(traj.lat0);
  const Eigen::Vector3d g_n(0.0, 0.0, g);

  SyntheticTruth out;
  out.initial = traj.initial_state();
  out.imu.reserve(n);
  out.truth.reserve(n);

  double lat = traj.lat0;
  double lon = traj.lon0;
  double depth = traj.depth0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = static_cast<double>(i) * dt;
    const double tm = t0 + 0.5 * dt;
    const double t1 = t0 + dt;

    // sample at the interval midpoint (zero-order-hold convention)
    ImuSample s;
    s.t = t0;
    s.w_ib = traj.body_rate(tm);
    const Eigen::Quaterniond q_mid = traj.attitude(tm);
    s.f_b = q_mid.conjugate() * (traj.accel_ned(tm) - g_n);
    out.imu.push_back(s);

    // ground truth at t1; position by Simpson quadrature of the velocity
    const Eigen::Vector3d v0 = traj.velocity_ned(t0);
    const Eigen::Vector3d vm = traj.velocity_ned(tm);
    const Eigen::Vector3d v1 = traj.velocity_ned(t1);
    const double lat_prev = lat;
    lat += dt / 6.0 * (v0.x() + 4.0 * vm.x() + v1.x()) / kEarthRadius;
    const double lat_mid = 0.5 * (lat_prev + lat);
    lon += dt / 6.0 *
           (v0.y() / std::cos(lat_prev) + 4.0 * vm.y() / std::cos(lat_mid) +
            v1.y() / std::cos(lat)) /
           kEarthRadius;
    depth += dt / 6.0 * (v0.z() + 4.0 * vm.z() + v1.z());

    NavState st;
    st.lat = lat;
    st.lon = wrap_pi(lon);
    st.depth = depth;
    st.v_n = v1;
    st.q_bn = traj.attitude(t1);
    out.truth.push_back(st);
  }
  return out;
}

}  // namespace auvnav

#include "auvnav/qadapt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "auvnav/textio.hpp"

namespace auvnav {
namespace {

constexpr double kScaleMin = 0.1;
constexpr double kScaleMax = 10.0;
constexpr double kComponentFloor = 1e-12;

std::pair<std::string, std::string> split_kind(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) return {text, ""};
  return {text.substr(0, colon), text.substr(colon + 1)};
}

}  // namespace

std::string strategy_name(const QStrategy& s) {
  if (const auto* c = std::get_if<ConstantQ>(&s)) {
    return "constant(qf=" + format_double(c->spec.q_f.x()) +
           ",qw=" + format_double(c->spec.q_w.x()) + ")";
  }
  if (const auto* a = std::get_if<InnovationAdaptiveQ>(&s)) {
    return "adaptive(window=" + std::to_string(a->window) + ")";
  }
  return "learned";
}

ProcessNoiseSpec next_q_constant(const ConstantQ& s) { return s.spec; }

ProcessNoiseSpec next_q_innovation(const InnovationAdaptiveQ& s,
                                   std::span<const Eigen::Vector3d> innovations,
                                   const Matrix12d& P_prior,
                                   const Eigen::Matrix3d& R,
                                   const ProcessNoiseSpec& current) {
  if (s.window < 1) {
    throw std::invalid_argument("adaptive: window must be >= 1");
  }
  if (innovations.empty()) return current;

  const std::size_t m =
      std::min<std::size_t>(static_cast<std::size_t>(s.window),
                            innovations.size());
  Eigen::Matrix3d c_hat = Eigen::Matrix3d::Zero();
  for (std::size_t k = innovations.size() - m; k < innovations.size(); ++k) {
    c_hat += innovations[k] * innovations[k].transpose();
  }
  c_hat /= static_cast<double>(m);

  const Eigen::Matrix3d s_pred = P_prior.topLeftCorner<3, 3>() + R;
  const double trace_s = s_pred.trace();
  if (!(trace_s > 0.0)) {
    throw std::runtime_error("adaptive: predicted innovation covariance lost "
                             "positivity");
  }
  const double alpha =
      std::clamp(c_hat.trace() / trace_s, kScaleMin, kScaleMax);

  ProcessNoiseSpec next = current;
  next.q_f = (alpha * current.q_f).cwiseMax(kComponentFloor);
  next.q_w = (alpha * current.q_w).cwiseMax(kComponentFloor);
  return next;
}

ProcessNoiseSpec next_q_learned(const LearnedQ& s,
                                std::span<const Window> windows,
                                const ProcessNoiseSpec& current) {
  if (!s.model) throw std::invalid_argument("learned: no model loaded");
  if (windows.size() != kImuChannels) {
    throw std::invalid_argument("learned: need one window per IMU channel");
  }

  std::array<bool, kImuChannels> seen{};
  ProcessNoiseSpec next = current;
  for (const Window& w : windows) {
    const std::size_t ch = static_cast<std::size_t>(w.channel);
    if (ch >= kImuChannels || seen[ch]) {
      throw std::invalid_argument("learned: channels must be distinct");
    }
    seen[ch] = true;
    const FeatureVector fv = extract_features(w, s.model->window_length);
    const double q = predict(*s.model, fv);
    if (is_accel_channel(w.channel)) {
      next.q_f[static_cast<Eigen::Index>(ch)] = q;
    } else {
      next.q_w[static_cast<Eigen::Index>(ch - 3)] = q;
    }
  }
  return next;
}

QStrategy parse_strategy(const std::string& text) {
  const auto [kind, rest] = split_kind(text);
  if (kind == "constant") {
    ConstantQ c;
    if (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      if (comma == std::string::npos) {
        throw std::invalid_argument("constant strategy wants <qf>,<qw>: " +
                                    text);
      }
      const double qf = parse_double(rest.substr(0, comma));
      const double qw = parse_double(rest.substr(comma + 1));
      if (!(qf > 0.0) || !(qw > 0.0)) {
        throw std::invalid_argument("constant strategy wants positive noise: " +
                                    text);
      }
      c.spec = ProcessNoiseSpec::isotropic(qf, qw);
    }
    return c;
  }
  if (kind == "adaptive") {
    InnovationAdaptiveQ a;
    if (!rest.empty()) {
      const long w = parse_long(rest);
      if (w < 1) {
        throw std::invalid_argument("adaptive strategy wants window >= 1: " +
                                    text);
      }
      a.window = static_cast<int>(w);
    }
    return a;
  }
  if (kind == "learned") {
    if (rest.empty()) {
      throw std::invalid_argument("learned strategy wants a model path: " +
                                  text);
    }
    LearnedQ l;
    l.model = std::make_shared<const TreeEnsemble>(load_ensemble(rest));
    return l;
  }
  throw std::invalid_argument("unknown strategy: " + text);
}

}  // namespace auvnav

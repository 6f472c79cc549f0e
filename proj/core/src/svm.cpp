#include "wlks/svm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "wlks/error.hpp"
#include "wlks/parallel.hpp"

namespace wlks {

std::vector<std::size_t> SvmModel::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > 0) out.push_back(i);
  }
  return out;
}

double SvmModel::max_kkt_violation(const KernelMatrix& k) const {
  if (degenerate) return 0.0;
  const auto f = decision(*this, k);
  double worst = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double margin = y[i] * f[i];
    double v = 0;
    if (alpha[i] <= 0) {
      v = std::max(0.0, 1.0 - margin);
    } else if (alpha[i] >= C) {
      v = std::max(0.0, margin - 1.0);
    } else {
      v = std::abs(margin - 1.0);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double SvmModel::dual_objective(const KernelMatrix& k) const {
  double lin = 0, quad = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0) continue;
    lin += alpha[i];
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] != 0) quad += alpha[i] * alpha[j] * y[i] * y[j] * k(i, j);
    }
  }
  return lin - 0.5 * quad;
}

namespace {

// Index sets of the dual: moving alpha_t in the ascent direction of y_t is
// feasible for t in I_up, in the descent direction for t in I_low.
bool in_up(double a, int y, double C) { return (y > 0 && a < C) || (y < 0 && a > 0); }
bool in_low(double a, int y, double C) { return (y < 0 && a < C) || (y > 0 && a > 0); }

}  // namespace

SvmModel smo_train(const BinaryProblem& prob, const SmoOptions& opts) {
  if (prob.kernel == nullptr) throw ContractError("smo_train: no kernel");
  const KernelMatrix& K = *prob.kernel;
  const std::size_t n = prob.y.size();
  if (K.rows() != n || K.cols() != n) throw ContractError("smo_train: kernel shape differs from label count");
  if (!(prob.C > 0)) throw ContractError("smo_train: C must be positive");
  for (int v : prob.y) {
    if (v != 1 && v != -1) throw ContractError("smo_train: labels must be +1 or -1");
  }

  SvmModel m;
  m.alpha.assign(n, 0.0);
  m.y = prob.y;
  m.C = prob.C;
  const bool any_pos = std::find(prob.y.begin(), prob.y.end(), 1) != prob.y.end();
  const bool any_neg = std::find(prob.y.begin(), prob.y.end(), -1) != prob.y.end();
  if (!any_pos || !any_neg) {
    m.degenerate = true;
    m.bias = any_pos ? 1.0 : -1.0;
    return m;
  }

  const double C = prob.C;
  const auto& y = prob.y;
  auto& a = m.alpha;
  std::vector<double> G(n, -1.0);  // gradient of 0.5 a'Qa - e'a, Q_ij = y_i y_j K_ij
  std::mt19937_64 rng(opts.seed);
  const std::size_t passes = opts.max_passes ? opts.max_passes : 10 * n;
  const std::size_t max_iter = passes * n;
  constexpr double kTau = 1e-12;

  auto objective = [&] {
    double d = 0;
    for (std::size_t t = 0; t < n; ++t) d += a[t] * (1.0 - G[t]) * 0.5;
    return d;
  };

  // Analytic update of the pair (i, j); returns false when it cannot move.
  auto take_step = [&](std::size_t i, std::size_t j) {
    const double Ei = y[i] * G[i];
    const double Ej = y[j] * G[j];
    double eta = K(i, i) + K(j, j) - 2 * K(i, j);
    if (eta <= 0) eta = kTau;
    double lo, hi;
    if (y[i] != y[j]) {
      lo = std::max(0.0, a[j] - a[i]);
      hi = std::min(C, C + a[j] - a[i]);
    } else {
      lo = std::max(0.0, a[i] + a[j] - C);
      hi = std::min(C, a[i] + a[j]);
    }
    if (hi - lo <= 0) return false;
    double aj = a[j] + y[j] * (Ei - Ej) / eta;
    aj = std::clamp(aj, lo, hi);
    const double dj = aj - a[j];
    if (std::abs(dj) <= 1e-15 * std::max(1.0, C)) return false;
    double ai = a[i] - y[i] * y[j] * dj;
    if (ai < 1e-12 * C) ai = 0.0;
    if (ai > C * (1 - 1e-12)) ai = C;
    if (aj < 1e-12 * C) aj = 0.0;
    if (aj > C * (1 - 1e-12)) aj = C;
    const double di = ai - a[i];
    const double dj2 = aj - a[j];
    a[i] = ai;
    a[j] = aj;
    for (std::size_t t = 0; t < n; ++t) {
      G[t] += y[t] * (y[i] * K(t, i) * di + y[j] * K(t, j) * dj2);
    }
    return true;
  };

  m.converged = false;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    double up_max = -std::numeric_limits<double>::infinity();
    double low_min = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * G[t];
      if (in_up(a[t], y[t], C) && v > up_max) {
        up_max = v;
        i = t;
      }
      if (in_low(a[t], y[t], C) && v < low_min) low_min = v;
    }
    if (i == n || !std::isfinite(low_min) || up_max - low_min < opts.tol) {
      m.converged = true;
      break;
    }
    // Partner: the violating index with the largest guaranteed gain, i.e. the
    // gap |E_i - E_j| squared over the pair's curvature.
    std::size_t j = n;
    double best_gain = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(a[t], y[t], C)) continue;
      const double gap = up_max + y[t] * G[t];
      if (gap <= 0) continue;
      double curv = K(i, i) + K(t, t) - 2 * K(i, t);
      if (curv <= 0) curv = kTau;
      const double gain = gap * gap / curv;
      if (gain > best_gain) {
        best_gain = gain;
        j = t;
      }
    }
    bool moved = take_step(i, j);
    if (!moved) {
      // Fallback: random violating partners for i.
      std::vector<std::size_t> cands;
      for (std::size_t t = 0; t < n; ++t) {
        if (t != i && in_low(a[t], y[t], C) && -y[t] * G[t] < up_max - opts.tol) cands.push_back(t);
      }
      std::shuffle(cands.begin(), cands.end(), rng);
      for (std::size_t t : cands) {
        if ((moved = take_step(i, t))) break;
      }
    }
    if (!moved) break;
    if (opts.trace_objective) m.objective_trace.push_back(objective());
  }
  m.iterations = iter;

  // Bias from free support vectors, else the midpoint of the feasible interval.
  double sum = 0;
  std::size_t free = 0;
  double up_max = -std::numeric_limits<double>::infinity();
  double low_min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const double v = -y[t] * G[t];
    if (a[t] > 0 && a[t] < C) {
      sum += v;
      ++free;
    }
    if (in_up(a[t], y[t], C)) up_max = std::max(up_max, v);
    if (in_low(a[t], y[t], C)) low_min = std::min(low_min, v);
  }
  if (free > 0) {
    m.bias = sum / static_cast<double>(free);
  } else if (std::isfinite(up_max) && std::isfinite(low_min)) {
    m.bias = 0.5 * (up_max + low_min);
  } else {
    m.bias = std::isfinite(up_max) ? up_max : low_min;
  }
  return m;
}

std::vector<double> decision(const SvmModel& model, const KernelMatrix& cross) {
  if (cross.cols() != model.alpha.size()) throw ContractError("decision: cross gram columns differ from train size");
  std::vector<double> f(cross.rows(), model.bias);
  if (model.degenerate) return f;
  const auto sv = model.support();
  for (std::size_t r = 0; r < cross.rows(); ++r) {
    double s = 0;
    for (std::size_t i : sv) s += model.alpha[i] * model.y[i] * cross(r, i);
    f[r] += s;
  }
  return f;
}

std::vector<std::vector<double>> MulticlassModel::scores(const KernelMatrix& cross) const {
  std::vector<std::vector<double>> out;
  out.reserve(per_class.size());
  for (const auto& m : per_class) out.push_back(decision(m, cross));
  return out;
}

std::vector<LabelSet> MulticlassModel::predict(const KernelMatrix& cross) const {
  const auto s = scores(cross);
  std::vector<LabelSet> out(cross.rows());
  for (std::size_t r = 0; r < cross.rows(); ++r) {
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < s.size(); ++c) {
      if (s[c][r] > s[best][r]) best = c;
    }
    if (multi_label) {
      for (std::uint32_t c = 0; c < s.size(); ++c) {
        if (s[c][r] > 0) out[r].push_back(c);
      }
    }
    if (out[r].empty()) out[r].push_back(best);
  }
  return out;
}

MulticlassModel fit_multiclass(const KernelMatrix& train, std::span<const LabelSet> labels, std::size_t num_classes,
                               double C, bool multi_label, const SmoOptions& opts, unsigned threads) {
  if (num_classes < 2) throw ContractError("fit_multiclass: need at least two classes");
  if (labels.size() != train.rows()) throw ContractError("fit_multiclass: label count differs from gram size");
  MulticlassModel mc;
  mc.multi_label = multi_label;
  mc.per_class.resize(num_classes);
  parallel_for(num_classes, threads, [&](std::size_t c) {
    BinaryProblem p{&train, std::vector<int>(labels.size(), -1), C};
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (std::find(labels[i].begin(), labels[i].end(), c) != labels[i].end()) p.y[i] = 1;
    }
    mc.per_class[c] = smo_train(p, opts);
  });
  return mc;
}

double micro_f1(std::span<const LabelSet> pred, std::span<const LabelSet> gold) {
  if (pred.size() != gold.size()) throw ContractError("micro_f1: length mismatch");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    LabelSet p = pred[i], g = gold[i];
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    LabelSet both;
    std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(both));
    tp += both.size();
    fp += p.size() - both.size();
    fn += g.size() - both.size();
  }
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("model: bad number '" + s + "'", line);
  return v;
}

}  // namespace

void write_model(const MulticlassModel& m, std::ostream& out) {
  out << "classes " << m.per_class.size() << " multi_label " << (m.multi_label ? 1 : 0) << '\n';
  for (std::size_t c = 0; c < m.per_class.size(); ++c) {
    const auto& b = m.per_class[c];
    const auto sv = b.support();
    out << "class " << c << " C " << fmt_double(b.C) << " bias " << fmt_double(b.bias) << " degenerate "
        << (b.degenerate ? 1 : 0) << " support " << sv.size() << '\n';
    for (std::size_t i : sv) out << i << ' ' << fmt_double(b.alpha[i] * b.y[i]) << '\n';
  }
}

MulticlassModel read_model(std::istream& in, std::size_t train_size) {
  MulticlassModel m;
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError("model: unexpected end of input", line_no + 1);
    ++line_no;
    return std::istringstream(line);
  };
  std::string kw1, kw2;
  std::size_t classes = 0;
  int multi = 0;
  {
    auto ss = next_line();
    if (!(ss >> kw1 >> classes >> kw2 >> multi) || kw1 != "classes" || kw2 != "multi_label") {
      throw ParseError("model: expected 'classes <n> multi_label <0|1>'", line_no);
    }
  }
  m.multi_label = multi != 0;
  m.per_class.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    auto ss = next_line();
    std::string k_class, k_c, c_str, k_bias, b_str, k_deg, k_sup;
    std::size_t id = 0, nsv = 0;
    int deg = 0;
    if (!(ss >> k_class >> id >> k_c >> c_str >> k_bias >> b_str >> k_deg >> deg >> k_sup >> nsv) ||
        k_class != "class" || id != c || k_c != "C" || k_bias != "bias" || k_deg != "degenerate" ||
        k_sup != "support") {
      throw ParseError("model: malformed class header", line_no);
    }
    auto& b = m.per_class[c];
    b.C = parse_double(c_str, line_no);
    b.bias = parse_double(b_str, line_no);
    b.degenerate = deg != 0;
    b.alpha.assign(train_size, 0.0);
    b.y.assign(train_size, 1);
    for (std::size_t s = 0; s < nsv; ++s) {
      auto row = next_line();
      std::size_t idx = 0;
      std::string coef;
      if (!(row >> idx >> coef)) throw ParseError("model: expected '<index> <alpha*y>'", line_no);
      if (idx >= train_size) throw RangeError("model: support index beyond training set", line_no);
      const double v = parse_double(coef, line_no);
      b.alpha[idx] = std::abs(v);
      b.y[idx] = v < 0 ? -1 : 1;
    }
  }
  return m;
}

}  // namespace wlks

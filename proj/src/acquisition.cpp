// Copyright 2026 The duelopt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "duelopt/acquisition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

#include "duelopt/normal.hpp"
#include "duelopt/uncertainty.hpp"

namespace duelopt {

// --- Rules -------------------------------------------------------------------------

namespace {

struct RuleEntry {
  RuleKind kind;
  const char* name;
  RuleFamily family;
  const char* param;  // nullptr, "beta", "k" or "m"
};

constexpr std::array<RuleEntry, 17> kRules = {{
    {RuleKind::Random, "random", RuleFamily::Binary, nullptr},
    {RuleKind::UCBPhi, "ucb-phi", RuleFamily::Binary, "beta"},
    {RuleKind::UCBLatent, "ucb-latent", RuleFamily::Binary, "beta"},
    {RuleKind::BinaryEI, "binary-ei", RuleFamily::Binary, nullptr},
    {RuleKind::ThompsonSampling, "ts", RuleFamily::Binary, nullptr},
    {RuleKind::RandomDuel, "random-duel", RuleFamily::Preference, nullptr},
    {RuleKind::EIBrochu, "ei-brochu", RuleFamily::Preference, nullptr},
    {RuleKind::BivariateEI, "bivariate-ei", RuleFamily::Preference, nullptr},
    {RuleKind::MUC, "muc", RuleFamily::Preference, nullptr},
    {RuleKind::DuelingTS, "dueling-ts", RuleFamily::Preference, nullptr},
    {RuleKind::DuelingUCB, "dueling-ucb", RuleFamily::Preference, "beta"},
    {RuleKind::EIIG, "eiig", RuleFamily::Preference, "k"},
    {RuleKind::DuelTS, "duel-ts", RuleFamily::Preference, nullptr},
    {RuleKind::KSS, "kss", RuleFamily::Preference, nullptr},
    {RuleKind::BatchRandom, "batch-random", RuleFamily::Batch, "m"},
    {RuleKind::BatchMUC, "batch-muc", RuleFamily::Batch, "m"},
    {RuleKind::BatchKSS, "batch-kss", RuleFamily::Batch, "m"},
}};

const RuleEntry& entry(RuleKind kind) {
  for (const auto& e : kRules) {
    if (e.kind == kind) return e;
  }
  throw InvalidArgument("unknown rule kind");
}

// Shortest decimal spelling that round-trips.
std::string format_number(double v) {
  char buf[64];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string joined_rule_names() {
  std::string out;
  for (const auto& e : kRules) {
    if (!out.empty()) out += ", ";
    out += e.name;
  }
  return out;
}

}  // namespace

RuleFamily AcquisitionRule::family() const { return entry(kind).family; }

AcquisitionRule AcquisitionRule::make(RuleKind kind) {
  AcquisitionRule r;
  r.kind = kind;
  switch (kind) {
    case RuleKind::UCBPhi: r.beta = normal_quantile(0.99); break;
    case RuleKind::UCBLatent:
    case RuleKind::DuelingUCB: r.beta = 1.0; break;
    default: break;
  }
  r.k = 1.0;
  r.batch_size = 3;
  return r;
}

std::string AcquisitionRule::name() const {
  const RuleEntry& e = entry(kind);
  std::string out = e.name;
  if (e.param == nullptr) return out;
  const AcquisitionRule def = make(kind);
  const std::string p = e.param;
  if (p == "beta" && beta != def.beta) out += ":beta=" + format_number(beta);
  if (p == "k" && k != def.k) out += ":k=" + format_number(k);
  if (p == "m" && batch_size != def.batch_size) out += ":m=" + std::to_string(batch_size);
  return out;
}

std::string AcquisitionRule::file_name() const {
  std::string out = name();
  std::replace(out.begin(), out.end(), ':', '_');
  std::replace(out.begin(), out.end(), '=', '-');
  return out;
}

AcquisitionRule AcquisitionRule::parse(const std::string& text) {
  std::istringstream in(text);
  std::string head;
  std::getline(in, head, ':');
  const RuleEntry* found = nullptr;
  for (const auto& e : kRules) {
    if (head == e.name) found = &e;
  }
  if (found == nullptr) {
    throw InvalidArgument("unknown rule '" + text + "'; valid rules: " + joined_rule_names());
  }
  AcquisitionRule rule = make(found->kind);
  std::string kv;
  while (std::getline(in, kv, ':')) {
    const auto eq = kv.find('=');
    const std::string key = kv.substr(0, eq);
    if (eq == std::string::npos || found->param == nullptr || key != found->param) {
      throw InvalidArgument("rule '" + head + "' does not take parameter '" + kv + "'");
    }
    const std::string value = kv.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !std::isfinite(v)) {
      throw InvalidArgument("rule '" + head + "': malformed value '" + value + "'");
    }
    if (key == "beta") {
      require(v >= 0.0, "rule '" + head + "': beta must be >= 0");
      rule.beta = v;
    } else if (key == "k") {
      rule.k = v;
    } else {
      require(v >= 2.0 && v == std::floor(v) && v <= 64.0,
              "rule '" + head + "': m must be an integer >= 2");
      rule.batch_size = static_cast<int>(v);
    }
  }
  return rule;
}

std::vector<std::string> rule_names() {
  std::vector<std::string> out;
  for (const auto& e : kRules) out.emplace_back(e.name);
  return out;
}

Duel QueryProposal::duel() const {
  require(points.size() >= 2, "QueryProposal: not a duel");
  return {points[0], points[1]};
}

OptimizerOptions AcquisitionOptions::single(Eigen::Index dim) const {
  OptimizerOptions o = default_optimizer_options(dim);
  if (restarts > 0) o.restarts = restarts;
  if (pool > 0) o.pool = pool;
  o.pool = std::max(o.pool, o.restarts);
  return o;
}

OptimizerOptions AcquisitionOptions::batch(Eigen::Index dim) const {
  OptimizerOptions o = default_optimizer_options(dim);
  o.restarts = batch_restarts;
  o.pool = std::max(pool > 0 ? pool : 256, o.restarts);
  return o;
}

// --- Surfaces ----------------------------------------------------------------------

namespace {

struct QuadratureRule {
  Vector nodes;
  Vector weights;
};

// Physicists' Gauss-Hermite by Golub-Welsch: int e^{-t^2} g(t) dt.
const QuadratureRule& gauss_hermite() {
  static const QuadratureRule rule = [] {
    const int n = kGaussHermiteNodes;
    Matrix j = Matrix::Zero(n, n);
    for (int i = 1; i < n; ++i) j(i, i - 1) = j(i - 1, i) = std::sqrt(0.5 * i);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(j);
    QuadratureRule r;
    r.nodes = eig.eigenvalues();
    r.weights = std::sqrt(kPi) * eig.eigenvectors().row(0).transpose().cwiseAbs2();
    return r;
  }();
  return rule;
}

// Adds a central-difference gradient to a value-only function.
SmoothObjective with_numeric_gradient(std::function<double(const Vector&)> f, Vector step) {
  return [f = std::move(f), step = std::move(step)](const Vector& x, Vector* grad) {
    const double v = f(x);
    if (grad != nullptr) {
      grad->resize(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp[i] += step[i];
        xm[i] -= step[i];
        (*grad)[i] = (f(xp) - f(xm)) / (2.0 * step[i]);
      }
    }
    return v;
  };
}

Vector fd_steps(const LatentPosterior& post) { return 1e-6 * post.dataset().box().width(); }

// EI of N(m, s2) over zero, with gradient from the gradients of m and s2.
double gaussian_ei(double m, double s2, const Vector* dm, const Vector* ds2, Vector* grad) {
  const double s = std::sqrt(std::max(s2, 0.0));
  if (s < 1e-12) {
    if (grad != nullptr) *grad = m > 0.0 ? *dm : Vector::Zero(dm->size());
    return std::max(m, 0.0);
  }
  const double z = m / s;
  const double cdf = normal_cdf(z);
  const double pdf = normal_pdf(z);
  if (grad != nullptr) *grad = cdf * *dm + pdf * (*ds2 / (2.0 * s));
  return m * cdf + s * pdf;
}

double epistemic_with_gradient(const LatentPredictionGradient& p, Eigen::Index column,
                               Vector* grad) {
  const MomentPair m{p.mean, p.variance};
  if (grad == nullptr) return epistemic_variance(m);
  const EpistemicPartials e = epistemic_variance_partials(m);
  *grad = e.d_mu * p.dmean.col(column) + e.d_sigma2 * p.dvariance.col(column);
  return e.value;
}

}  // namespace

SmoothObjective ucb_phi_surface(const LatentPosterior& post, double beta) {
  return [&post, beta](const Vector& x, Vector* grad) {
    if (grad == nullptr) {
      const LatentPrediction p = post.predict(LatentQuery::point(x));
      const MomentPair m{p.mean, p.variance};
      return class_probability(m) + beta * std::sqrt(epistemic_variance(m));
    }
    const LatentPredictionGradient p = post.predict_with_gradient(LatentQuery::point(x));
    const MomentPair m{p.mean, p.variance};
    const double q = 1.0 + std::max(p.variance, 0.0);
    const double h = p.mean / std::sqrt(q);
    const Vector dmu_c = normal_pdf(h) * (p.dmean.col(0) / std::sqrt(q) -
                                          0.5 * p.mean * std::pow(q, -1.5) * p.dvariance.col(0));
    const EpistemicPartials e = epistemic_variance_partials(m);
    const double root = std::sqrt(e.value);
    *grad = dmu_c;
    if (root > 1e-150) {
      *grad += beta / (2.0 * root) * (e.d_mu * p.dmean.col(0) + e.d_sigma2 * p.dvariance.col(0));
    }
    return normal_cdf(h) + beta * root;
  };
}

SmoothObjective ucb_latent_surface(const LatentPosterior& post, double beta) {
  return [&post, beta](const Vector& x, Vector* grad) {
    if (grad == nullptr) {
      const LatentPrediction p = post.predict(LatentQuery::point(x));
      return p.mean + beta * std::sqrt(p.variance);
    }
    const LatentPredictionGradient p = post.predict_with_gradient(LatentQuery::point(x));
    const double s = std::sqrt(p.variance);
    *grad = p.dmean.col(0);
    if (s > 1e-150) *grad += beta / (2.0 * s) * p.dvariance.col(0);
    return p.mean + beta * s;
  };
}

SmoothObjective mean_surface(const LatentPosterior& post) {
  return [&post](const Vector& x, Vector* grad) {
    if (grad == nullptr) return post.predict(LatentQuery::point(x)).mean;
    const LatentPredictionGradient p = post.predict_with_gradient(LatentQuery::point(x));
    *grad = p.dmean.col(0);
    return p.mean;
  };
}

SmoothObjective binary_ei_surface(const LatentPosterior& post, double best) {
  auto value = [&post, best](const Vector& x) {
    const LatentPrediction p = post.predict(LatentQuery::point(x));
    const QuadratureRule& gh = gauss_hermite();
    const double scale = std::sqrt(2.0 * p.variance);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < gh.nodes.size(); ++i) {
      sum += gh.weights[i] * std::max(0.0, normal_cdf(p.mean + scale * gh.nodes[i]) - best);
    }
    return sum / std::sqrt(kPi);
  };
  return with_numeric_gradient(value, fd_steps(post));
}

SmoothObjective challenger_surface(const LatentPosterior& post, const Vector& champion) {
  return [&post, champion](const Vector& x, Vector* grad) {
    const LatentQuery q = LatentQuery::duel(champion, x);
    if (grad == nullptr) {
      const LatentPrediction p = post.predict(q);
      return epistemic_variance(MomentPair{p.mean, p.variance});
    }
    return epistemic_with_gradient(post.predict_with_gradient(q), 1, grad);
  };
}

SmoothObjective expected_improvement_surface(const LatentPosterior& post, double threshold) {
  return [&post, threshold](const Vector& x, Vector* grad) {
    if (grad == nullptr) {
      const LatentPrediction p = post.predict(LatentQuery::point(x));
      return gaussian_ei(p.mean - threshold, p.variance, nullptr, nullptr, nullptr);
    }
    const LatentPredictionGradient p = post.predict_with_gradient(LatentQuery::point(x));
    const Vector dm = p.dmean.col(0), ds2 = p.dvariance.col(0);
    return gaussian_ei(p.mean - threshold, p.variance, &dm, &ds2, grad);
  };
}

SmoothObjective bivariate_ei_surface(const LatentPosterior& post, const Vector& reference) {
  return [&post, reference](const Vector& x, Vector* grad) {
    const LatentQuery q = LatentQuery::duel(x, reference);
    if (grad == nullptr) {
      const LatentPrediction p = post.predict(q);
      return gaussian_ei(p.mean, p.variance, nullptr, nullptr, nullptr);
    }
    const LatentPredictionGradient p = post.predict_with_gradient(q);
    const Vector dm = p.dmean.col(0), ds2 = p.dvariance.col(0);
    return gaussian_ei(p.mean, p.variance, &dm, &ds2, grad);
  };
}

SmoothObjective eiig_surface(const LatentPosterior& post, const Vector& champion, double k) {
  auto value = [&post, champion, k](const Vector& x) {
    const LatentPrediction p = post.predict(LatentQuery::duel(x, champion));
    const MomentPair m{p.mean, p.variance};
    return k * log_normal_cdf(p.mean / std::sqrt(1.0 + p.variance)) - bald_information_gain(m);
  };
  return with_numeric_gradient(value, fd_steps(post));
}

SmoothObjective batch_challenger_surface(const LatentPosterior& post, const Vector& champion,
                                         int batch_size) {
  require(batch_size >= 2, "batch size must be >= 2");
  const Eigen::Index d = champion.size();
  return [&post, champion, batch_size, d](const Vector& x, Vector* grad) {
    require(x.size() == d * (batch_size - 1), "batch surface: stacked point dimension mismatch");
    auto member = [&](int i) -> Vector {
      return i == 0 ? champion : Vector(x.segment((i - 1) * d, d));
    };
    double total = 0.0;
    if (grad != nullptr) grad->setZero(x.size());
    Vector g;
    for (int i = 0; i < batch_size; ++i) {
      for (int j = i + 1; j < batch_size; ++j) {
        const LatentQuery q = LatentQuery::duel(member(i), member(j));
        if (grad == nullptr) {
          const LatentPrediction p = post.predict(q);
          total += epistemic_variance(MomentPair{p.mean, p.variance});
          continue;
        }
        const LatentPredictionGradient p = post.predict_with_gradient(q);
        const MomentPair m{p.mean, p.variance};
        const EpistemicPartials e = epistemic_variance_partials(m);
        total += e.value;
        if (i > 0) {
          grad->segment((i - 1) * d, d) += e.d_mu * p.dmean.col(0) + e.d_sigma2 * p.dvariance.col(0);
        }
        grad->segment((j - 1) * d, d) += e.d_mu * p.dmean.col(1) + e.d_sigma2 * p.dvariance.col(1);
      }
    }
    return total;
  };
}

// --- Proposals ---------------------------------------------------------------------

Vector uniform_point(const SearchBox& box, RandomStream& rng) {
  Vector u(box.dim());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.uniform();
  return box.from_unit(u);
}

OptimizerResult maximize_posterior_mean(const LatentPosterior& post, RandomStream& rng,
                                        const OptimizerOptions& options) {
  return optimize_inner(mean_surface(post), true, post.dataset().box(), rng, options);
}

namespace {

QueryProposal from_result(std::vector<Vector> points, const OptimizerResult& r, int extra_restarts) {
  QueryProposal out;
  out.points = std::move(points);
  out.acquisition_value = r.value;
  out.restarts_used = r.restarts_used + extra_restarts;
  out.best_restart = r.best_restart;
  return out;
}

// Observed point with the largest posterior mean (first on ties).
Vector best_observed(const LatentPosterior& post, RandomStream& rng) {
  const std::vector<Vector> pts = post.dataset().distinct_points();
  if (pts.empty()) return uniform_point(post.dataset().box(), rng);
  std::size_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double m = post.predict(LatentQuery::point(pts[i])).mean;
    if (m > best_mean) {
      best_mean = m;
      best = i;
    }
  }
  return pts[best];
}

void require_mode(const LatentPosterior& post, ObservationMode mode, const char* what) {
  require(post.dataset().mode() == mode, std::string(what) + ": posterior has the wrong mode");
}

}  // namespace

QueryProposal propose_bbo(const AcquisitionRule& rule, const LatentPosterior& post,
                          const FeatureMap& fm, RandomStream& rng,
                          const AcquisitionOptions& options) {
  require(rule.family() == RuleFamily::Binary, "propose_bbo: '" + rule.name() + "' is not a BBO rule");
  require_mode(post, ObservationMode::Binary, "propose_bbo");
  const SearchBox& box = post.dataset().box();
  const OptimizerOptions opt = options.single(box.dim());
  switch (rule.kind) {
    case RuleKind::Random: {
      QueryProposal out;
      out.points = {uniform_point(box, rng)};
      return out;
    }
    case RuleKind::UCBPhi: {
      const OptimizerResult r = optimize_inner(ucb_phi_surface(post, rule.beta), true, box, rng, opt);
      return from_result({r.x}, r, 0);
    }
    case RuleKind::UCBLatent: {
      const OptimizerResult r =
          optimize_inner(ucb_latent_surface(post, rule.beta), true, box, rng, opt);
      return from_result({r.x}, r, 0);
    }
    case RuleKind::BinaryEI: {
      double best = 0.0;
      for (const auto& o : post.dataset().observations()) {
        best = std::max(best, predict_class_probability(post, o.x));
      }
      const OptimizerResult r = optimize_inner(binary_ei_surface(post, best), true, box, rng, opt);
      return from_result({r.x}, r, 0);
    }
    case RuleKind::ThompsonSampling: {
      const PathSample s = sample_decoupled(post, fm, rng);
      const OptimizerResult r = maximize_sample(s, box, rng, opt);
      return from_result({r.x}, r, 0);
    }
    default: break;
  }
  throw InvalidArgument("propose_bbo: unsupported rule");
}

QueryProposal propose_kss(const LatentPosterior& post, const FeatureMap& fm, RandomStream& first,
                          RandomStream& second, const AcquisitionOptions& options) {
  const SearchBox& box = post.dataset().box();
  const OptimizerOptions opt = options.single(box.dim());
  const OptimizerResult a = maximize_sample(sample_decoupled(post, fm, first), box, first, opt);
  const OptimizerResult b = maximize_sample(sample_decoupled(post, fm, second), box, second, opt);
  return from_result({a.x, b.x}, b, a.restarts_used);
}

QueryProposal propose_duel(const AcquisitionRule& rule, const LatentPosterior& post,
                           const FeatureMap& fm, RandomStream& rng,
                           const AcquisitionOptions& options) {
  require(rule.family() == RuleFamily::Preference,
          "propose_duel: '" + rule.name() + "' is not a PBO rule");
  require_mode(post, ObservationMode::Preference, "propose_duel");
  const SearchBox& box = post.dataset().box();
  const OptimizerOptions opt = options.single(box.dim());

  switch (rule.kind) {
    case RuleKind::RandomDuel: {
      QueryProposal out;
      Vector a = uniform_point(box, rng);
      Vector b = uniform_point(box, rng);
      out.points = {std::move(a), std::move(b)};
      return out;
    }
    case RuleKind::KSS: return propose_kss(post, fm, rng, rng, options);
    case RuleKind::EIBrochu:
    case RuleKind::BivariateEI: {
      const Vector ref = best_observed(post, rng);
      OptimizerResult r;
      if (rule.kind == RuleKind::EIBrochu) {
        const double threshold = post.predict(LatentQuery::point(ref)).mean;
        r = optimize_inner(expected_improvement_surface(post, threshold), true, box, rng, opt);
      } else {
        r = optimize_inner(bivariate_ei_surface(post, ref), true, box, rng, opt);
      }
      return from_result({ref, r.x}, r, 0);
    }
    case RuleKind::DuelTS: {
      const OptimizerResult first = maximize_sample(sample_decoupled(post, fm, rng), box, rng, opt);
      const OptimizerResult r =
          optimize_inner(challenger_surface(post, first.x), true, box, rng, opt);
      return from_result({first.x, r.x}, r, first.restarts_used);
    }
    default: break;
  }

  const OptimizerResult champ = maximize_posterior_mean(post, rng, opt);
  const Vector& x1 = champ.x;
  OptimizerResult r;
  switch (rule.kind) {
    case RuleKind::MUC:
      r = optimize_inner(challenger_surface(post, x1), true, box, rng, opt);
      break;
    case RuleKind::DuelingTS:
      r = maximize_sample(sample_decoupled(post, fm, rng), box, rng, opt);
      break;
    case RuleKind::DuelingUCB:
      r = optimize_inner(ucb_latent_surface(post, rule.beta), true, box, rng, opt);
      break;
    case RuleKind::EIIG:
      r = optimize_inner(eiig_surface(post, x1, rule.k), true, box, rng, opt);
      break;
    default: throw InvalidArgument("propose_duel: unsupported rule");
  }
  return from_result({x1, r.x}, r, champ.restarts_used);
}

QueryProposal propose_batch(const AcquisitionRule& rule, const LatentPosterior& post,
                            const FeatureMap& fm, RandomStream& rng, int m,
                            const AcquisitionOptions& options) {
  require(rule.family() == RuleFamily::Batch,
          "propose_batch: '" + rule.name() + "' is not a batch rule");
  require(m >= 2, "propose_batch: batch size must be >= 2");
  require_mode(post, ObservationMode::Preference, "propose_batch");
  const SearchBox& box = post.dataset().box();
  const Eigen::Index d = box.dim();
  QueryProposal out;
  switch (rule.kind) {
    case RuleKind::BatchRandom:
      for (int i = 0; i < m; ++i) out.points.push_back(uniform_point(box, rng));
      return out;
    case RuleKind::BatchKSS: {
      const OptimizerOptions opt = options.single(d);
      for (int i = 0; i < m; ++i) {
        const OptimizerResult r = maximize_sample(sample_decoupled(post, fm, rng), box, rng, opt);
        out.points.push_back(r.x);
        out.restarts_used += r.restarts_used;
        out.acquisition_value = r.value;
      }
      return out;
    }
    case RuleKind::BatchMUC: {
      const OptimizerResult champ = maximize_posterior_mean(post, rng, options.single(d));
      const SearchBox joint = product_box(box, m - 1);
      const OptimizerResult r = optimize_inner(batch_challenger_surface(post, champ.x, m), true,
                                               joint, rng, options.batch(joint.dim()));
      out.points.push_back(champ.x);
      for (int i = 1; i < m; ++i) out.points.push_back(r.x.segment((i - 1) * d, d));
      out.acquisition_value = r.value;
      out.restarts_used = champ.restarts_used + r.restarts_used;
      out.best_restart = r.best_restart;
      return out;
    }
    default: break;
  }
  throw InvalidArgument("propose_batch: unsupported rule");
}

QueryProposal propose(const AcquisitionRule& rule, const LatentPosterior& post,
                      const FeatureMap& fm, RandomStream& rng,
                      const AcquisitionOptions& options) {
  switch (rule.family()) {
    case RuleFamily::Binary: return propose_bbo(rule, post, fm, rng, options);
    case RuleFamily::Preference: return propose_duel(rule, post, fm, rng, options);
    case RuleFamily::Batch: return propose_batch(rule, post, fm, rng, rule.batch_size, options);
  }
  throw InvalidArgument("propose: unknown rule family");
}

}  // namespace duelopt

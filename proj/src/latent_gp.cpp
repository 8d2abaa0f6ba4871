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

#include "duelopt/latent_gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>

#include <nlohmann/json.hpp>

#include "duelopt/normal.hpp"

namespace duelopt {

using nlohmann::json;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

constexpr double kBoxTolerance = 1e-12;

}  // namespace

// --- ObservationDataset ------------------------------------------------------

std::string to_string(ObservationMode mode) {
  return mode == ObservationMode::Binary ? "binary" : "preference";
}

ObservationMode parse_observation_mode(const std::string& name) {
  if (name == "binary") return ObservationMode::Binary;
  if (name == "preference") return ObservationMode::Preference;
  throw InvalidArgument("unknown observation mode '" + name + "' (expected binary or preference)");
}

ObservationDataset::ObservationDataset(ObservationMode mode, SearchBox box, KernelConfig kernel)
    : mode_(mode), box_(std::move(box)), kernel_(std::move(kernel)) {
  kernel_.validate();
  require(kernel_.dim() == box_.dim(), "ObservationDataset: kernel and box dimensions differ");
}

void ObservationDataset::set_kernel(KernelConfig kernel) {
  kernel.validate();
  require(kernel.dim() == box_.dim(), "ObservationDataset: kernel and box dimensions differ");
  kernel_ = std::move(kernel);
}

void ObservationDataset::add(const Observation& obs) {
  require(obs.outcome == 0 || obs.outcome == 1, "observation outcome must be 0 or 1");
  require(box_.contains(obs.x, kBoxTolerance), "observation point outside the search box");
  if (mode_ == ObservationMode::Preference) {
    require(box_.contains(obs.x2, kBoxTolerance), "duel member outside the search box");
  } else {
    require(obs.x2.size() == 0, "binary observation must not carry a second point");
  }
  observations_.push_back(obs);
}

void ObservationDataset::add_binary(const Vector& x, int outcome, int iteration,
                                    std::uint64_t seed) {
  require(mode_ == ObservationMode::Binary, "add_binary on a preference dataset");
  add(Observation{x, Vector(), outcome, iteration, seed});
}

void ObservationDataset::add_duel(const Duel& duel, int outcome, int iteration,
                                  std::uint64_t seed) {
  require(mode_ == ObservationMode::Preference, "add_duel on a binary dataset");
  add(Observation{duel.first, duel.second, outcome, iteration, seed});
}

std::vector<Vector> ObservationDataset::distinct_points() const {
  std::vector<Vector> out;
  auto push = [&](const Vector& p) {
    for (const auto& q : out) {
      if (q == p) return;
    }
    out.push_back(p);
  };
  for (const auto& o : observations_) {
    push(o.x);
    if (o.x2.size() > 0) push(o.x2);
  }
  return out;
}

void ObservationDataset::write_jsonl(std::ostream& out) const {
  json header = {{"type", "header"},
                 {"mode", to_string(mode_)},
                 {"lower", to_std(box_.lower())},
                 {"upper", to_std(box_.upper())},
                 {"kernel", kernel_}};
  out << header.dump() << '\n';
  for (const auto& o : observations_) {
    json rec = {{"x", to_std(o.x)}, {"c", o.outcome}, {"iteration", o.iteration},
                {"seed", o.seed}};
    if (o.x2.size() > 0) rec["x2"] = to_std(o.x2);
    out << rec.dump() << '\n';
  }
}

ObservationDataset ObservationDataset::read_jsonl(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) -> IoError {
    return IoError("dataset line " + std::to_string(lineno) + ": " + what);
  };
  json header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      header = json::parse(line);
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
    break;
  }
  if (header.is_null() || header.value("type", "") != "header") {
    throw fail("expected a header record {\"type\": \"header\", ...}");
  }
  std::optional<ObservationDataset> ds;
  try {
    ds.emplace(parse_observation_mode(header.at("mode").get<std::string>()),
               SearchBox(from_std(header.at("lower").get<std::vector<double>>()),
                         from_std(header.at("upper").get<std::vector<double>>())),
               header.at("kernel").get<KernelConfig>());
  } catch (const json::exception& e) {
    throw fail(e.what());
  } catch (const InvalidArgument& e) {
    throw fail(e.what());
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json rec = json::parse(line);
      Observation o;
      o.x = from_std(rec.at("x").get<std::vector<double>>());
      if (rec.contains("x2")) o.x2 = from_std(rec.at("x2").get<std::vector<double>>());
      o.outcome = rec.at("c").get<int>();
      o.iteration = rec.value("iteration", 0);
      o.seed = rec.value("seed", std::uint64_t{0});
      ds->add(o);
    } catch (const json::exception& e) {
      throw fail(e.what());
    } catch (const InvalidArgument& e) {
      throw fail(e.what());
    }
  }
  return std::move(*ds);
}

void ObservationDataset::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_jsonl(out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

ObservationDataset ObservationDataset::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  return read_jsonl(in);
}

// --- Queries -----------------------------------------------------------------

LatentQuery LatentQuery::point(const Vector& x) {
  LatentQuery q;
  q.points = x;
  q.coeffs = Vector::Ones(1);
  return q;
}

LatentQuery LatentQuery::duel(const Vector& first, const Vector& second) {
  require(first.size() == second.size(), "duel members differ in dimension");
  LatentQuery q;
  q.points.resize(first.size(), 2);
  q.points.col(0) = first;
  q.points.col(1) = second;
  q.coeffs = Vector(2);
  q.coeffs << 1.0, -1.0;
  return q;
}

double prior_covariance(const KernelConfig& cfg, const LatentQuery& a, const LatentQuery& b) {
  return a.coeffs.dot(cross_covariance(cfg, a.points, b.points) * b.coeffs);
}

std::string to_string(InferenceMethod method) {
  return method == InferenceMethod::EP ? "ep" : "laplace";
}

InferenceMethod parse_inference_method(const std::string& name) {
  if (name == "ep") return InferenceMethod::EP;
  if (name == "laplace") return InferenceMethod::Laplace;
  throw InvalidArgument("unknown inference method '" + name + "' (expected ep or laplace)");
}

// --- LatentPosterior -----------------------------------------------------------

LatentPosterior::LatentPosterior(ObservationDataset dataset, InferenceMethod method)
    : dataset_(std::move(dataset)), method_(method) {
  const auto& obs = dataset_.observations();
  const auto n = static_cast<Eigen::Index>(obs.size());
  labels_.resize(n);
  train_.reserve(obs.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Observation& o = obs[static_cast<std::size_t>(i)];
    train_.push_back(dataset_.mode() == ObservationMode::Binary ? LatentQuery::point(o.x)
                                                                : LatentQuery::duel(o.x, o.x2));
    labels_[i] = o.outcome == 1 ? 1.0 : -1.0;
  }
  const KernelConfig& cfg = dataset_.kernel();
  gram_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram_(i, j) = gram_(j, i) = prior_covariance(cfg, train_[i], train_[j]);
    }
    gram_(i, i) += cfg.jitter;
  }
}

LatentPosterior LatentPosterior::fit(const ObservationDataset& dataset,
                                     const InferenceOptions& options) {
  LatentPosterior post(dataset, options.method);
  if (post.size() == 0) {
    post.alpha_.resize(0);
    post.sqrt_w_.resize(0);
    return post;
  }
  if (options.method == InferenceMethod::EP) {
    post.fit_ep(options);
  } else {
    post.fit_laplace(options);
  }
  return post;
}

void LatentPosterior::finalize(const Vector& site_precision) {
  sqrt_w_ = site_precision.cwiseMax(0.0).cwiseSqrt();
  Matrix b = sqrt_w_.asDiagonal() * gram_ * sqrt_w_.asDiagonal();
  b.diagonal().array() += 1.0;
  b_llt_.compute(b);
  if (b_llt_.info() != Eigen::Success) {
    throw NumericalError("posterior: factorization of I + W^1/2 K W^1/2 failed");
  }
}

void LatentPosterior::fit_ep(const InferenceOptions& options) {
  require(options.ep_damping > 0.0 && options.ep_damping <= 1.0, "EP damping must be in (0, 1]");
  const Eigen::Index n = size();
  const Matrix& k = gram_;
  Vector tau = Vector::Zero(n), nu = Vector::Zero(n);
  Matrix sigma = k;
  Vector mu = Vector::Zero(n);
  const double damping = options.ep_damping;

  diagnostics_ = {};
  diagnostics_.converged = false;
  for (int sweep = 0; sweep < options.ep_max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double tau_cav = 1.0 / sigma(i, i) - tau[i];
      const double nu_cav = mu[i] / sigma(i, i) - nu[i];
      if (!(tau_cav > 0.0)) {
        ++diagnostics_.skipped_site_updates;
        continue;
      }
      const double var_cav = 1.0 / tau_cav;
      const double mean_cav = nu_cav * var_cav;
      const double y = labels_[i];
      const double denom = std::sqrt(1.0 + var_cav);
      const double z = y * mean_cav / denom;
      const double ratio = normal_hazard(z);
      const double mean_hat = mean_cav + y * var_cav * ratio / denom;
      const double var_hat = var_cav - var_cav * var_cav * ratio * (z + ratio) / (1.0 + var_cav);
      if (!(var_hat > 0.0) || !std::isfinite(mean_hat)) {
        ++diagnostics_.skipped_site_updates;
        continue;
      }
      const double tau_new = (1.0 - damping) * tau[i] + damping * (1.0 / var_hat - tau_cav);
      const double nu_new = (1.0 - damping) * nu[i] + damping * (mean_hat / var_hat - nu_cav);
      if (!(tau_new >= 0.0) || !std::isfinite(nu_new)) {
        ++diagnostics_.skipped_site_updates;
        continue;
      }
      const double dtau = tau_new - tau[i];
      max_change = std::max({max_change, std::fabs(dtau), std::fabs(nu_new - nu[i])});
      tau[i] = tau_new;
      nu[i] = nu_new;
      const Vector si = sigma.col(i);
      sigma.noalias() -= (dtau / (1.0 + dtau * si[i])) * si * si.transpose();
      mu = sigma * nu;
    }
    // Recompute from scratch to shed accumulated rounding.
    finalize(tau);
    const Matrix v = b_llt_.matrixL().solve(sqrt_w_.asDiagonal() * k);
    sigma = k - v.transpose() * v;
    mu = sigma * nu;
    diagnostics_.iterations = sweep + 1;
    diagnostics_.residual = max_change;
    if (max_change < options.ep_tolerance) {
      diagnostics_.converged = true;
      break;
    }
  }
  if (!diagnostics_.converged && !(diagnostics_.residual < 1e-3)) {
    throw NumericalError("EP did not converge after " + std::to_string(options.ep_max_sweeps) +
                         " sweeps (max site change " + std::to_string(diagnostics_.residual) + ")");
  }
  finalize(tau);
  const Vector z = sqrt_w_.cwiseProduct(b_llt_.solve(sqrt_w_.cwiseProduct(k * nu)));
  alpha_ = nu - z;
}

void LatentPosterior::fit_laplace(const InferenceOptions& options) {
  const Eigen::Index n = size();
  const Matrix& k = gram_;
  Vector f = Vector::Zero(n), a = Vector::Zero(n);
  Vector grad(n), w(n);

  auto derivatives = [&](const Vector& ff) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = labels_[i] * ff[i];
      const double r = normal_hazard(z);
      grad[i] = labels_[i] * r;
      w[i] = r * (r + z);
    }
  };
  auto objective = [&](const Vector& aa, const Vector& ff) {
    double s = -0.5 * aa.dot(ff);
    for (Eigen::Index i = 0; i < n; ++i) s += log_normal_cdf(labels_[i] * ff[i]);
    return s;
  };

  diagnostics_ = {};
  diagnostics_.converged = false;
  double psi = objective(a, f);
  for (int it = 0; it < options.laplace_max_iterations; ++it) {
    derivatives(f);
    diagnostics_.residual = (grad - a).cwiseAbs().maxCoeff();
    diagnostics_.iterations = it;
    if (diagnostics_.residual < options.laplace_tolerance) {
      diagnostics_.converged = true;
      break;
    }
    finalize(w);
    const Vector b = w.cwiseProduct(f) + grad;
    const Vector a_newton =
        b - sqrt_w_.cwiseProduct(b_llt_.solve(sqrt_w_.cwiseProduct(k * b)));
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      const Vector a_try = a + step * (a_newton - a);
      const Vector f_try = k * a_try;
      const double psi_try = objective(a_try, f_try);
      if (std::isfinite(psi_try) && psi_try >= psi) {
        a = a_try;
        f = f_try;
        psi = psi_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (!diagnostics_.converged) {
    derivatives(f);
    diagnostics_.residual = (grad - a).cwiseAbs().maxCoeff();
    if (!(diagnostics_.residual < 1e-4)) {
      throw NumericalError("Laplace Newton iteration did not converge (gradient residual " +
                           std::to_string(diagnostics_.residual) + ")");
    }
  }
  derivatives(f);
  finalize(w);
  alpha_ = grad;
}

Vector LatentPosterior::cross(const LatentQuery& q) const {
  const Eigen::Index n = size();
  Vector out(n);
  for (Eigen::Index j = 0; j < n; ++j) out[j] = prior_covariance(kernel(), q, train_[j]);
  return out;
}

Vector LatentPosterior::cross_prior(const Vector& x) const { return cross(LatentQuery::point(x)); }

Vector LatentPosterior::cross_prior_with_gradient(const Vector& x, Matrix& grad) const {
  const Eigen::Index n = size();
  const Eigen::Index d = x.size();
  Vector out = Vector::Zero(n);
  grad.setZero(d, n);
  Vector g(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    const LatentQuery& t = train_[j];
    for (Eigen::Index r = 0; r < t.size(); ++r) {
      const double kv = kernel_eval_with_gradient(kernel(), x, t.points.col(r), g);
      out[j] += t.coeffs[r] * kv;
      grad.col(j) += t.coeffs[r] * g;
    }
  }
  return out;
}

LatentPrediction LatentPosterior::predict(const LatentQuery& q) const {
  require(q.points.rows() == kernel().dim(), "predict: query dimension does not match kernel");
  const double prior = prior_covariance(kernel(), q, q);
  if (size() == 0) return {0.0, std::max(prior, 0.0)};
  const Vector ks = cross(q);
  const Vector v = b_llt_.matrixL().solve(sqrt_w_.cwiseProduct(ks));
  return {ks.dot(alpha_), std::max(prior - v.squaredNorm(), 0.0)};
}

LatentPredictionGradient LatentPosterior::predict_with_gradient(const LatentQuery& q) const {
  const Eigen::Index d = kernel().dim();
  const Eigen::Index p = q.size();
  const Eigen::Index n = size();
  require(q.points.rows() == d, "predict: query dimension does not match kernel");
  LatentPredictionGradient out;
  out.dmean.setZero(d, p);
  out.dvariance.setZero(d, p);

  // Prior variance of the functional and its gradient.
  Vector g(d);
  double prior = 0.0;
  for (Eigen::Index s = 0; s < p; ++s) {
    for (Eigen::Index r = 0; r < p; ++r) {
      const double kv = kernel_eval_with_gradient(kernel(), q.points.col(s), q.points.col(r), g);
      prior += q.coeffs[s] * q.coeffs[r] * kv;
      if (r != s) out.dvariance.col(s) += 2.0 * q.coeffs[s] * q.coeffs[r] * g;
    }
  }
  if (n == 0) {
    out.variance = std::max(prior, 0.0);
    return out;
  }

  Vector ks = Vector::Zero(n);
  std::vector<Matrix> dks(static_cast<std::size_t>(p));
  Matrix gj;
  for (Eigen::Index s = 0; s < p; ++s) {
    const Vector ks_s = cross_prior_with_gradient(q.points.col(s), gj);
    ks += q.coeffs[s] * ks_s;
    dks[static_cast<std::size_t>(s)] = q.coeffs[s] * gj;
  }
  const Vector v = b_llt_.matrixL().solve(sqrt_w_.cwiseProduct(ks));
  const Vector u = sqrt_w_.cwiseProduct(b_llt_.matrixU().solve(v));
  out.mean = ks.dot(alpha_);
  out.variance = prior - v.squaredNorm();
  for (Eigen::Index s = 0; s < p; ++s) {
    const Matrix& dk = dks[static_cast<std::size_t>(s)];
    out.dmean.col(s) = dk * alpha_;
    out.dvariance.col(s) -= 2.0 * dk * u;
  }
  out.variance = std::max(out.variance, 0.0);
  return out;
}

double LatentPosterior::covariance(const LatentQuery& a, const LatentQuery& b) const {
  const double prior = prior_covariance(kernel(), a, b);
  if (size() == 0) return prior;
  const Vector va = b_llt_.matrixL().solve(sqrt_w_.cwiseProduct(cross(a)));
  const Vector vb = b_llt_.matrixL().solve(sqrt_w_.cwiseProduct(cross(b)));
  return prior - va.dot(vb);
}

Vector LatentPosterior::train_mean() const {
  if (size() == 0) return Vector();
  return gram_ * alpha_;
}

Matrix LatentPosterior::train_covariance() const {
  if (size() == 0) return Matrix();
  const Matrix v = b_llt_.matrixL().solve(sqrt_w_.asDiagonal() * gram_);
  Matrix s = gram_ - v.transpose() * v;
  return 0.5 * (s + s.transpose());
}

// --- Free functions ------------------------------------------------------------

LatentPosterior fit_laplace(const ObservationDataset& dataset, InferenceOptions options) {
  require(!dataset.empty(), "fit_laplace: dataset is empty");
  options.method = InferenceMethod::Laplace;
  return LatentPosterior::fit(dataset, options);
}

LatentPosterior fit_ep(const ObservationDataset& dataset, InferenceOptions options) {
  require(!dataset.empty(), "fit_ep: dataset is empty");
  options.method = InferenceMethod::EP;
  return LatentPosterior::fit(dataset, options);
}

namespace {
void check_in_box(const LatentPosterior& post, const Vector& x) {
  require(post.dataset().box().contains(x, kBoxTolerance), "query point outside the search box");
}
}  // namespace

LatentPrediction predict_latent(const LatentPosterior& post, const Vector& x) {
  check_in_box(post, x);
  return post.predict(LatentQuery::point(x));
}

LatentPrediction predict_latent(const LatentPosterior& post, const Duel& duel) {
  check_in_box(post, duel.first);
  check_in_box(post, duel.second);
  return post.predict(LatentQuery::duel(duel));
}

double predict_latent_cov(const LatentPosterior& post, const Vector& x, const Vector& y) {
  check_in_box(post, x);
  check_in_box(post, y);
  return post.covariance(LatentQuery::point(x), LatentQuery::point(y));
}

LatentPrediction predict_value_from_preferences(const LatentPosterior& post, const Vector& x) {
  require(post.dataset().mode() == ObservationMode::Preference,
          "predict_value_from_preferences requires a preference dataset");
  return predict_latent(post, x);
}

double predict_class_probability(const LatentPosterior& post, const Vector& x) {
  const LatentPrediction p = predict_latent(post, x);
  return normal_cdf(p.mean / std::sqrt(1.0 + p.variance));
}

double predict_class_probability(const LatentPosterior& post, const Duel& duel) {
  const LatentPrediction p = predict_latent(post, duel);
  return normal_cdf(p.mean / std::sqrt(1.0 + p.variance));
}

}  // namespace duelopt

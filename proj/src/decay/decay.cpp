#include "ryd/decay/decay.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "ryd/core/parallel.hpp"

namespace ryd::decay {

void DecayModel::validate() const {
  if (!(gamma_per_us >= 0.0) || !std::isfinite(gamma_per_us)) throw InvalidModelError("decay rate must be non-negative");
  double sum = 0.0;
  for (double b : branches) {
    if (!(b >= 0.0)) throw InvalidModelError("branching ratios must be non-negative");
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidModelError("branching ratios must sum to 1");
}

bool DecayModel::detected(Branch b, DetectionMode mode) {
  switch (b) {
    case Branch::kDetectedLoss:
    case Branch::kGround:
      return true;
    case Branch::kM0:
      return mode == DetectionMode::kRydbergQubit;
    case Branch::kM1:
    case Branch::kOther:
      return false;
  }
  return false;
}

double DecayModel::detection_fidelity(DetectionMode mode) const {
  double p = 0.0;
  for (int b = 0; b < kBranchCount; ++b)
    if (detected(static_cast<Branch>(b), mode)) p += branches[b];
  return p;
}

DecayModel DecayModel::with_detection(double gamma_per_us, double p_det) {
  if (!(p_det >= 0.0 && p_det <= 1.0)) throw InvalidModelError("detection fidelity must lie in [0, 1]");
  DecayModel m;
  m.gamma_per_us = gamma_per_us;
  m.branches = {p_det, 0.0, 1.0 - p_det, 0.0, 0.0};
  m.validate();
  return m;
}

Operator with_decay(const Operator& h, double gamma_per_us) {
  if (gamma_per_us == 0.0) return h;
  const BasisPtr& basis = h.basis();
  Eigen::VectorXd half(basis->dim());
  for (Index k = 0; k < basis->dim(); ++k) half[k] = 0.5 * gamma_per_us * basis->excitations(k);
  if (const auto* t = std::get_if<TermList>(&h.representation())) {
    TermList out = *t;
    out.decay = out.decay.size() == 0 ? half : Eigen::VectorXd(out.decay + half);
    return Operator::terms(basis, std::move(out));
  }
  SparseMatrix m;
  if (const auto* d = std::get_if<Operator::Diagonal>(&h.representation())) {
    m.resize(basis->dim(), basis->dim());
    m.setIdentity();
    for (Index k = 0; k < basis->dim(); ++k) m.coeffRef(k, k) = d->values[k];
  } else {
    m = std::get<Operator::Sparse>(h.representation()).matrix;
  }
  for (Index k = 0; k < basis->dim(); ++k) m.coeffRef(k, k) -= kI * half[k];
  m.makeCompressed();
  return Operator::sparse(basis, std::move(m));
}

StateVector no_jump_propagate(const StateVector& state, const Operator& h, const DecayModel& decay, double duration_us,
                              const PropagationOptions& opt) {
  decay.validate();
  return propagate(state, with_decay(h, decay.gamma_per_us), duration_us, opt);
}

StateVector no_jump_propagate(const StateVector& state, std::span<const Segment> segments, const DecayModel& decay,
                              const PropagationOptions& opt) {
  decay.validate();
  std::vector<Segment> eff;
  eff.reserve(segments.size());
  for (const Segment& s : segments) eff.push_back({with_decay(s.hamiltonian, decay.gamma_per_us), s.duration_us});
  return propagate(state, eff, opt);
}

namespace {

// sigma^- on one site, normalized
StateVector lower_site(const StateVector& psi, int site) {
  const Basis& b = *psi.basis;
  StateVector out(psi.basis);
  out.time_us = psi.time_us;
  for (Index k = 0; k < psi.dim(); ++k) {
    if (!b.excited(k, site)) continue;
    const Index j = b.flip_site(k, site);
    if (j >= 0) out.amplitudes[j] += psi.amplitudes[k];
  }
  return out.normalized();
}

}  // namespace

TrajectoryOutcome sample_trajectory(const StateVector& initial, std::span<const Segment> segments,
                                    const DecayModel& decay, Rng& rng, const TrajectoryOptions& opt,
                                    std::span<const double> sample_times, const TrajectoryObserver& observer) {
  decay.validate();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double threshold = uniform(rng);
  StateVector psi = initial.normalized();
  const double t_start = psi.time_us;
  double now = 0.0;
  std::size_t next_sample = 0;

  auto emit_samples = [&]() {
    while (next_sample < sample_times.size() && sample_times[next_sample] <= now + 1e-12) {
      if (observer) observer(static_cast<int>(next_sample), psi.normalized());
      ++next_sample;
    }
  };
  emit_samples();

  for (const Segment& seg : segments) {
    const SegmentPropagator prop(with_decay(seg.hamiltonian, decay.gamma_per_us), opt.propagation);
    const double seg_end = now + seg.duration_us;
    while (now < seg_end - 1e-15) {
      double stop = seg_end;
      if (next_sample < sample_times.size()) stop = std::min(stop, sample_times[next_sample]);
      Eigen::VectorXcd trial = psi.amplitudes;
      prop.apply(trial, stop - now);
      if (trial.squaredNorm() > threshold) {
        psi.amplitudes = std::move(trial);
        now = stop;
        emit_samples();
        continue;
      }
      // the no-jump norm only decreases, so bisection finds the jump time
      double lo = 0.0, hi = stop - now;
      while (hi - lo > opt.time_tolerance_us) {
        const double mid = 0.5 * (lo + hi);
        trial = psi.amplitudes;
        prop.apply(trial, mid);
        (trial.squaredNorm() > threshold ? lo : hi) = mid;
      }
      prop.apply(psi.amplitudes, hi);
      now += hi;

      TrajectoryOutcome out;
      out.jump_time_us = now;
      // site with weight <n_i>, branch from the table
      const Basis& b = *psi.basis;
      std::vector<double> occupation(b.n_sites(), 0.0);
      for (Index k = 0; k < psi.dim(); ++k) {
        const double p = std::norm(psi.amplitudes[k]);
        for (int i = 0; i < b.n_sites(); ++i)
          if (b.excited(k, i)) occupation[i] += p;
      }
      std::discrete_distribution<int> pick_site(occupation.begin(), occupation.end());
      std::discrete_distribution<int> pick_branch(decay.branches.begin(), decay.branches.end());
      out.site = pick_site(rng);
      out.branch = static_cast<Branch>(pick_branch(rng));
      if (DecayModel::detected(out.branch, opt.mode)) {
        out.fate = Fate::kLost;
      } else {
        out.fate = Fate::kUndetected;
        if (out.branch == Branch::kM1) {
          out.state = lower_site(psi, out.site);
          out.state->time_us = t_start + now;
        }
      }
      return out;
    }
  }
  TrajectoryOutcome out;
  psi.time_us = t_start + now;
  out.state = psi.normalized();
  return out;
}

DecayCurve postselected_decay_curve(double p0, const DecayModel& decay, std::span<const double> times_us,
                                    DetectionMode mode) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw InvalidModelError("initial Rydberg fraction must lie in [0, 1]");
  decay.validate();
  const double p_det = decay.detection_fidelity(mode);
  auto basis = full_basis(1);
  StateVector psi(basis);
  psi.amplitudes << std::sqrt(1.0 - p0), std::sqrt(p0);
  const Operator idle = Operator::diagonal(basis, Eigen::VectorXd::Zero(2));

  DecayCurve curve;
  curve.p0 = p0;
  curve.times_us.assign(times_us.begin(), times_us.end());
  double prev_t = 0.0;
  for (double t : times_us) {
    if (t < prev_t) throw Error("decay curve times must be ascending and non-negative");
    psi = no_jump_propagate(psi, idle, decay, t - prev_t);
    prev_t = t;
    const double kept = psi.norm_squared();
    const double undetected = (1.0 - p_det) * (1.0 - kept);
    const double accepted = kept + undetected;
    curve.rydberg.push_back(accepted > 0.0 ? std::norm(psi.amplitudes[1]) / accepted : 0.0);
    curve.rydberg_err.push_back(0.0);
    curve.acceptance.push_back(accepted);
  }
  return curve;
}

DecayCurve trajectory_decay_curve(double p0, const DecayModel& decay, std::span<const double> times_us,
                                  int trajectories, std::uint64_t seed, int threads, DetectionMode mode) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw InvalidModelError("initial Rydberg fraction must lie in [0, 1]");
  if (trajectories < 1) throw InvalidModelError("need at least one trajectory");
  auto basis = full_basis(1);
  StateVector psi(basis);
  psi.amplitudes << std::sqrt(1.0 - p0), std::sqrt(p0);
  const double t_end = times_us.empty() ? 0.0 : times_us.back();
  const std::vector<Segment> segments{{Operator::diagonal(basis, Eigen::VectorXd::Zero(2)), t_end}};
  const std::size_t q_count = times_us.size();

  struct Record {
    std::vector<double> rydberg;  // P_r at each sample reached before a jump
    TrajectoryOutcome outcome;
  };
  std::vector<Record> records(trajectories);
  TrajectoryOptions opt;
  opt.mode = mode;
  parallel_for(trajectories, threads, [&](Index i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Record& r = records[i];
    r.outcome = sample_trajectory(psi, segments, decay, rng, opt, times_us,
                                  [&](int, const StateVector& s) { r.rydberg.push_back(std::norm(s.amplitudes[1])); });
    r.outcome.state.reset();
  });

  DecayCurve curve;
  curve.p0 = p0;
  curve.times_us.assign(times_us.begin(), times_us.end());
  for (std::size_t q = 0; q < q_count; ++q) {
    double n = 0, sum = 0, sum2 = 0;
    for (const Record& r : records) {
      double value;
      if (q < r.rydberg.size()) {
        value = r.rydberg[q];
      } else if (r.outcome.fate == Fate::kUndetected) {
        value = 0.0;  // decayed atom sits outside |r>
      } else {
        continue;  // discarded
      }
      n += 1;
      sum += value;
      sum2 += value * value;
    }
    const double mean = n > 0 ? sum / n : 0.0;
    const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
    curve.rydberg.push_back(mean);
    curve.rydberg_err.push_back(n > 0 ? std::sqrt(var / n) : 0.0);
    curve.acceptance.push_back(n / trajectories);
  }
  return curve;
}

DecayFit fit_decay_curve(const DecayCurve& curve, std::span<const double> sigma, int points) {
  const std::size_t m = curve.times_us.size();
  if (m < 2) throw Error("decay fit needs at least two points");
  if (!sigma.empty() && sigma.size() != m) throw Error("one sigma per curve point expected");
  std::size_t used = 0;
  if (points > 0) {
    used = std::min<std::size_t>(m, points);
  } else {
    const double cut = curve.rydberg[0] / std::exp(1.0);
    while (used < m && curve.rydberg[used] >= cut) ++used;
    used = std::min(m, std::max<std::size_t>(used, 3));
  }

  const std::span<const double> err = sigma.empty() ? std::span<const double>(curve.rydberg_err) : sigma;
  std::vector<double> w;
  bool noisy = false;
  for (std::size_t i = 0; i < used; ++i) noisy = noisy || err[i] > 0.0;
  if (noisy) {
    // points known exactly (t = 0) get the smallest nonzero error instead of infinite weight
    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < used; ++i)
      if (err[i] > 0.0) floor = std::min(floor, err[i]);
    for (std::size_t i = 0; i < used; ++i) w.push_back(1.0 / std::pow(std::max(err[i], floor), 2));
  }
  DecayFit out;
  out.p0 = curve.p0;
  out.points_used = static_cast<int>(used);
  out.fit = analysis::fit_exponential_decay(std::span(curve.times_us).first(used), std::span(curve.rydberg).first(used),
                                            w);
  return out;
}

std::vector<DecayFit> decay_curve_analysis(std::span<const double> p0_grid, const DecayModel& decay,
                                           std::span<const double> times_us, DetectionMode mode) {
  std::vector<DecayFit> fits;
  for (double p0 : p0_grid) fits.push_back(fit_decay_curve(postselected_decay_curve(p0, decay, times_us, mode)));
  return fits;
}

ImpliedDetection implied_detection_fidelity(double tau_us, double tau_err_us, double gamma_per_us,
                                            std::span<const double> times_us, int points,
                                            std::span<const double> sigma) {
  if (!(gamma_per_us > 0.0)) throw InvalidModelError("decay rate must be positive");
  auto tau_of = [&](double p) {
    const DecayFit f =
        fit_decay_curve(postselected_decay_curve(1.0, DecayModel::with_detection(gamma_per_us, p), times_us), sigma, points);
    return f.fit.finite ? f.fit.tau : std::numeric_limits<double>::infinity();
  };
  ImpliedDetection out;
  if (!std::isfinite(tau_us)) {
    out.p_det = 1.0;
    return out;
  }
  // tau grows with p_det
  double lo = 0.0, hi = 1.0 - 1e-12;
  if (tau_us <= tau_of(lo)) {
    out.p_det = 0.0;
  } else if (tau_us >= tau_of(hi)) {
    out.p_det = 1.0;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      (tau_of(mid) < tau_us ? lo : hi) = mid;
    }
    out.p_det = 0.5 * (lo + hi);
  }
  const double h = 1e-5;
  const double a = std::max(0.0, out.p_det - h), b = std::min(1.0 - 1e-12, out.p_det + h);
  const double slope = (tau_of(b) - tau_of(a)) / (b - a);
  out.p_det_err = slope > 0.0 ? tau_err_us / slope : 0.0;
  return out;
}

void write_decay_fits_csv(std::ostream& os, std::span<const DecayFit> fits) {
  os << "P0,tau_us,tau_err\n";
  os.precision(10);
  for (const DecayFit& f : fits) {
    os << f.p0 << ',';
    if (f.fit.finite)
      os << f.fit.tau << ',' << f.fit.tau_err << '\n';
    else
      os << "inf,0\n";
  }
}

using grape::pulse_segments;

PostselectedResult postselected_manybody_evolution(const grape::PulseProfile& pulse, const Geometry& geometry,
                                                   const InteractionModel& interaction, const DecayModel& decay,
                                                   const GhzTarget& target, DetectionMode mode,
                                                   const PropagationOptions& opt) {
  decay.validate();
  pulse.validate();
  const RydbergHamiltonian ham(target.basis, geometry, interaction);
  const StateVector start = StateVector::ground(target.basis);

  PostselectedResult out;
  const StateVector closed = propagate(start, pulse_segments(pulse, ham, 0.0), opt);
  out.closed_fidelity = std::norm(target.overlap(closed.amplitudes));
  const StateVector kept = propagate(start, pulse_segments(pulse, ham, decay.gamma_per_us), opt);
  const double survive = kept.norm_squared();
  const double undetected = (1.0 - decay.detection_fidelity(mode)) * (1.0 - survive);
  out.acceptance = std::clamp(survive + undetected, 0.0, 1.0);
  // undetected decays leave an atom outside the two-level manifold, which has
  // no overlap with the target
  out.fidelity_raw = std::norm(target.overlap(kept.amplitudes));
  out.fidelity_postselected = out.acceptance > 0.0 ? out.fidelity_raw / out.acceptance : 0.0;
  return out;
}

PostselectedEstimate trajectory_manybody_evolution(const grape::PulseProfile& pulse, const Geometry& geometry,
                                                   const InteractionModel& interaction, const DecayModel& decay,
                                                   const GhzTarget& target, int trajectories, std::uint64_t seed,
                                                   int threads, DetectionMode mode) {
  if (trajectories < 1) throw InvalidModelError("need at least one trajectory");
  const RydbergHamiltonian ham(target.basis, geometry, interaction);
  const std::vector<Segment> segs = pulse_segments(pulse, ham, 0.0);
  const StateVector start = StateVector::ground(target.basis);
  TrajectoryOptions opt;
  opt.mode = mode;
  // -1 discarded, otherwise the fidelity of an accepted shot
  std::vector<double> value(trajectories);
  parallel_for(trajectories, threads, [&](Index i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const TrajectoryOutcome o = sample_trajectory(start, segs, decay, rng, opt);
    if (o.fate == Fate::kLost)
      value[i] = -1.0;
    else if (o.fate == Fate::kUndetected)
      value[i] = 0.0;
    else
      value[i] = std::norm(target.overlap(o.state->amplitudes));
  });
  double n = 0, sum = 0, sum2 = 0;
  for (double v : value) {
    if (v < 0.0) continue;
    n += 1;
    sum += v;
    sum2 += v * v;
  }
  PostselectedEstimate out;
  out.acceptance = n / trajectories;
  out.acceptance_err = std::sqrt(out.acceptance * (1.0 - out.acceptance) / trajectories);
  if (n > 0) {
    out.fidelity_postselected = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum2 - n * out.fidelity_postselected * out.fidelity_postselected) / (n - 1)) : 0.0;
    out.fidelity_postselected_err = std::sqrt(var / n);
  }
  return out;
}

}  // namespace ryd::decay

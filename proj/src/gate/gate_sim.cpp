#include "ryd/gate/gate_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "ryd/core/parallel.hpp"

namespace ryd::gate {

GateChannel::GateChannel(const TogPulse& pulse, const std::vector<SliceControl>& controls, double blockade,
                         const DecayRates& rates, int quadrature_nodes) {
  slices_.reserve(controls.size());
  for (const SliceControl& c : controls) slices_.emplace_back(c, blockade, rates, pulse.dt(), quadrature_nodes);
  for (int i = 0; i < kDim; ++i) {
    const int n1 = (level_of(i, 0) == kM1) + (level_of(i, 1) == kM1);
    z_[i] = std::polar(1.0, -n1 * pulse.compensation);
  }
}

void GateChannel::apply(Matrix16& rho) const {
  for (const LindbladSlice& s : slices_) s.apply(rho);
  rho = z_.asDiagonal() * rho * z_.conjugate().asDiagonal();
}

double GateFidelityResult::raw_err() const { return samples > 0 ? raw_std / std::sqrt(double(samples)) : 0.0; }
double GateFidelityResult::loss_err() const {
  return samples > 0 ? loss_detected_std / std::sqrt(double(samples)) : 0.0;
}

namespace {

using QubitBlock = Eigen::Matrix4cd;

// Phi(|q_i><q_j|) restricted to the qubit block, from Hermitian combinations
// since the slice map symmetrizes its input.
std::array<std::array<QubitBlock, 4>, 4> qubit_map(const GateChannel& ch) {
  auto block = [](const Matrix16& rho) {
    QubitBlock b;
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) b(k, l) = rho(kQubitIndices[k], kQubitIndices[l]);
    return b;
  };
  std::array<std::array<QubitBlock, 4>, 4> m;
  for (int i = 0; i < 4; ++i) {
    Matrix16 rho = Matrix16::Zero();
    rho(kQubitIndices[i], kQubitIndices[i]) = 1.0;
    ch.apply(rho);
    m[i][i] = block(rho);
    for (int j = i + 1; j < 4; ++j) {
      Matrix16 x = Matrix16::Zero(), y = Matrix16::Zero();
      x(kQubitIndices[i], kQubitIndices[j]) = x(kQubitIndices[j], kQubitIndices[i]) = 1.0;
      y(kQubitIndices[i], kQubitIndices[j]) = kI;
      y(kQubitIndices[j], kQubitIndices[i]) = -kI;
      ch.apply(x);
      ch.apply(y);
      const QubitBlock bx = block(x), by = block(y);
      m[i][j] = 0.5 * (bx - kI * by);
      m[j][i] = 0.5 * (bx + kI * by);
    }
  }
  return m;
}

struct Moments {
  double raw = 0, raw2 = 0, loss = 0, loss2 = 0, acc = 0;
  long n = 0;
};

}  // namespace

GateFidelityResult simulate_gate_fidelity(const TogPulse& pulse, const NoiseModel& noise,
                                          const decay::DecayModel& decay, const GateFidelityOptions& opt) {
  pulse.validate();
  noise.validate();
  if (opt.haar_states < 1) throw InvalidModelError("need at least one input state");
  const DecayRates rates = DecayRates::from_model(decay);
  const int realizations = noise.active() ? noise.realizations : 1;
  std::vector<Moments> parts(realizations);
  parallel_for(realizations, opt.threads, [&](Index r) {
    Rng noise_rng(derive_seed(noise.seed, r));
    const GateChannel ch(pulse, sample_controls(pulse, noise, noise_rng), opt.blockade, rates, opt.quadrature_nodes);
    const auto m = qubit_map(ch);
    Rng rng(derive_seed(opt.seed, r));
    std::normal_distribution<double> g(0.0, 1.0);
    Moments& acc = parts[r];
    for (int s = 0; s < opt.haar_states; ++s) {
      Eigen::Vector4cd c;
      for (int k = 0; k < 4; ++k) c[k] = Complex(g(rng), g(rng));
      c.normalize();
      Eigen::Vector4cd ideal = c;
      ideal[3] = -ideal[3];
      QubitBlock out = QubitBlock::Zero();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out += (c[i] * std::conj(c[j])) * m[i][j];
      const double f = (ideal.adjoint() * out * ideal)(0, 0).real();
      const double kept = out.trace().real();
      const double fl = kept > 0 ? f / kept : 0.0;
      acc.raw += f;
      acc.raw2 += f * f;
      acc.loss += fl;
      acc.loss2 += fl * fl;
      acc.acc += kept;
      ++acc.n;
    }
  });
  Moments t;
  for (const Moments& p : parts) {
    t.raw += p.raw;
    t.raw2 += p.raw2;
    t.loss += p.loss;
    t.loss2 += p.loss2;
    t.acc += p.acc;
    t.n += p.n;
  }
  GateFidelityResult out;
  out.samples = t.n;
  const double n = double(t.n);
  out.raw = t.raw / n;
  out.loss_detected = t.loss / n;
  out.acceptance = t.acc / n;
  out.raw_std = std::sqrt(std::max(0.0, t.raw2 / n - out.raw * out.raw));
  out.loss_detected_std = std::sqrt(std::max(0.0, t.loss2 / n - out.loss_detected * out.loss_detected));
  return out;
}

std::vector<ChannelFidelity> fidelity_breakdown(const TogPulse& pulse, const NoiseModel& noise,
                                                const decay::DecayModel& decay, const GateFidelityOptions& opt) {
  std::vector<ChannelFidelity> out;
  decay::DecayModel off = decay;
  off.gamma_per_us = 0.0;
  out.push_back({"decay", simulate_gate_fidelity(pulse, NoiseModel::none(), decay, opt)});
  for (int c = 0; c < kNoiseChannels; ++c) {
    const NoiseModel one = noise.only(static_cast<NoiseChannel>(c));
    if (!one.active()) continue;
    out.push_back({channel_name(static_cast<NoiseChannel>(c)), simulate_gate_fidelity(pulse, one, off, opt)});
  }
  out.push_back({"total", simulate_gate_fidelity(pulse, noise, decay, opt)});
  return out;
}

const char* detection_name(GrbDetection d) {
  switch (d) {
    case GrbDetection::kRaw: return "raw";
    case GrbDetection::kErasureDecay: return "erasure_decay";
    case GrbDetection::kLoss: return "loss";
  }
  return "?";
}

namespace {

Eigen::Matrix2cd canonical(Eigen::Matrix2cd u) {
  for (int k = 0; k < 4; ++k) {
    const Complex v = u(k / 2, k % 2);
    if (std::abs(v) > 1e-9) return u * (std::abs(v) / v);
  }
  return u;
}

}  // namespace

const std::vector<Eigen::Matrix2cd>& clifford_group() {
  static const std::vector<Eigen::Matrix2cd> group = [] {
    Eigen::Matrix2cd h, s;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    s << 1, 0, 0, kI;
    std::vector<Eigen::Matrix2cd> g{Eigen::Matrix2cd::Identity()};
    for (std::size_t k = 0; k < g.size(); ++k) {
      for (const auto& gen : {h, s}) {
        const Eigen::Matrix2cd next = canonical(gen * g[k]);
        const bool seen = std::any_of(g.begin(), g.end(), [&](const Eigen::Matrix2cd& x) { return (x - next).norm() < 1e-9; });
        if (!seen) g.push_back(next);
      }
    }
    return g;
  }();
  return group;
}

namespace {

Matrix4 embed(const Eigen::Matrix2cd& u) {
  Matrix4 m = Matrix4::Identity();
  m.topLeftCorner<2, 2>() = u;
  return m;
}

Matrix16 global_op(const Eigen::Matrix2cd& u) {
  const Matrix4 e = embed(u);
  Matrix16 out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) out(pair_index(a, b), pair_index(c, d)) = e(a, c) * e(b, d);
  return out;
}

Eigen::Matrix4cd qubit_op(const Eigen::Matrix2cd& u) {
  Eigen::Matrix4cd out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) out(2 * a + b, 2 * c + d) = u(a, c) * u(b, d);
  return out;
}

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  return x;
}

void depolarize(Matrix16& rho, double p) {
  if (p <= 0.0) return;
  Eigen::Matrix2cd x = pauli_x(), y, z;
  y << 0, -kI, kI, 0;
  z << 1, 0, 0, -1;
  for (int atom = 0; atom < 2; ++atom) {
    Matrix16 mixed = Matrix16::Zero();
    for (const auto& pm : {x, y, z}) {
      const Matrix4 e = embed(pm);
      Matrix16 op = Matrix16::Zero();
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) {
              const Complex ea = atom == 0 ? e(a, c) : Complex(a == c);
              const Complex eb = atom == 1 ? e(b, d) : Complex(b == d);
              op(pair_index(a, b), pair_index(c, d)) = ea * eb;
            }
      mixed += op * rho * op.adjoint();
    }
    rho = (1.0 - p) * rho + (p / 3.0) * mixed;
  }
}

// Removes every component with an atom in r0; returns the trace removed.
double ionize(Matrix16& rho) {
  double removed = 0.0;
  for (int i = 0; i < kDim; ++i) {
    if (level_of(i, 0) != kR0 && level_of(i, 1) != kR0) continue;
    removed += rho(i, i).real();
    rho.row(i).setZero();
    rho.col(i).setZero();
  }
  return removed;
}

// Share of decayed-level population that survives post-selection.
double decayed_kept(const decay::DecayModel& d, GrbDetection mode) {
  using decay::Branch;
  const double det = d.branch(Branch::kDetectedLoss), ground = d.branch(Branch::kGround), other = d.branch(Branch::kOther);
  const double all = det + ground + other;
  if (all <= 0.0) return 1.0;
  switch (mode) {
    case GrbDetection::kRaw: return 1.0;
    case GrbDetection::kErasureDecay: return (det + other) / all;
    case GrbDetection::kLoss: return other / all;
  }
  return 1.0;
}

struct Recovery {
  std::array<int, 4> r{};
};

// R4 G R3 G R2 G R1 |s> = |00> up to phase, with the echo X before R2, R3 and,
// when a gate precedes R1, before R1 too.
Recovery find_recovery(const Eigen::Vector4cd& s, const Eigen::Matrix4cd& gate, bool echo, bool x_before_first, Rng& rng) {
  const auto& cl = clifford_group();
  const int n = static_cast<int>(cl.size());
  std::vector<Eigen::Matrix4cd> ops(n);
  for (int k = 0; k < n; ++k) ops[k] = qubit_op(cl[k]);
  const Eigen::Matrix4cd x = qubit_op(pauli_x());
  const Eigen::Matrix4cd pre = (echo && x_before_first) ? x : Eigen::Matrix4cd::Identity();
  const Eigen::Matrix4cd mid = echo ? x : Eigen::Matrix4cd::Identity();
  std::vector<int> order(n * n * n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int code : order) {
    const int r1 = code % n, r2 = (code / n) % n, r3 = code / (n * n);
    const Eigen::Vector4cd t = gate * ops[r3] * mid * gate * ops[r2] * mid * gate * ops[r1] * pre * s;
    // t = a (x) a for some single-qubit a
    Eigen::Matrix2cd m;
    m << t[0], t[1], t[2], t[3];
    if (std::abs(m.determinant()) > 1e-9 || (m - m.transpose()).norm() > 1e-9) continue;
    for (int r4 = 0; r4 < n; ++r4) {
      const Eigen::Vector4cd f = ops[r4] * t;
      if (std::abs(std::abs(f[0]) - 1.0) < 1e-9) return {{r1, r2, r3, r4}};
    }
  }
  throw Error("no recovery sequence returns the state to |00>");
}

struct Machine {
  const GateChannel& gate;
  const GrbOptions& opt;
  Eigen::Matrix4cd ideal_gate;
  Matrix16 rho = Matrix16::Zero();
  Eigen::Vector4cd ideal = Eigen::Vector4cd::Zero();
  double ionized = 0.0;

  void clifford(const Eigen::Matrix2cd& u) {
    const Matrix16 g = global_op(u);
    rho = g * rho * g.adjoint();
    depolarize(rho, opt.single_qubit_error);
    ideal = qubit_op(u) * ideal;
  }
  void entangle() {
    gate.apply(rho);
    ionized += ionize(rho);
    ideal = ideal_gate * ideal;
  }
};

}  // namespace

GrbData run_grb(const TogPulse& pulse, const NoiseModel& noise, const decay::DecayModel& decay, const GrbOptions& opt) {
  pulse.validate();
  noise.validate();
  if (opt.depths.empty()) throw InvalidModelError("gRB needs at least one depth");
  std::vector<int> depths = opt.depths;
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  if (depths.front() < 3) throw InvalidModelError("gRB depths must be at least 3 (the recovery uses three gates)");
  if (opt.instances < 1) throw InvalidModelError("gRB needs at least one instance");
  const DecayRates rates = DecayRates::from_model(decay);
  const auto& cl = clifford_group();
  const Eigen::Matrix2cd x = pauli_x();
  Eigen::Matrix4cd ideal_gate = Eigen::Matrix4cd::Identity();
  if (opt.ideal == IdealGate::kCz) ideal_gate(3, 3) = -1.0;
  std::array<double, kGrbDetections> kept_share{};
  for (int m = 0; m < kGrbDetections; ++m) kept_share[m] = decayed_kept(decay, static_cast<GrbDetection>(m));

  const int nd = static_cast<int>(depths.size());
  std::vector<GrbPoint> points(static_cast<std::size_t>(opt.instances) * nd * kGrbDetections);
  parallel_for(opt.instances, opt.threads, [&](Index inst) {
    Rng noise_rng(derive_seed(noise.seed, inst));
    const GateChannel gate(pulse, sample_controls(pulse, noise, noise_rng), opt.blockade, rates, opt.quadrature_nodes);
    Rng rng(derive_seed(opt.seed, inst));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(cl.size()) - 1);
    Machine run{gate, opt, ideal_gate};
    run.rho(0, 0) = 1.0;
    run.ideal[0] = 1.0;
    int layers = 0;
    for (int di = 0; di < nd; ++di) {
      const int prefix = depths[di] - 3;
      while (layers < prefix) {
        const Eigen::Matrix2cd u = cl[pick(rng)];
        run.clifford(opt.echo && layers > 0 ? Eigen::Matrix2cd(u * x) : u);
        run.entangle();
        ++layers;
      }
      Machine tail = run;
      const Recovery rec = find_recovery(tail.ideal, ideal_gate, opt.echo, layers > 0, rng);
      for (int k = 0; k < 3; ++k) {
        const bool echo_here = opt.echo && (k > 0 || layers > 0);
        tail.clifford(echo_here ? Eigen::Matrix2cd(cl[rec.r[k]] * x) : cl[rec.r[k]]);
        tail.entangle();
      }
      tail.clifford(cl[rec.r[3]]);
      const double hit = tail.rho(0, 0).real();
      for (int m = 0; m < kGrbDetections; ++m) {
        const auto mode = static_cast<GrbDetection>(m);
        double keep = 0.0;
        if (mode == GrbDetection::kRaw) {
          keep = 1.0;
        } else {
          for (int i = 0; i < kDim; ++i) {
            double w = 1.0;
            for (int atom = 0; atom < 2; ++atom)
              if (level_of(i, atom) == kDecayed) w *= kept_share[m];
            keep += w * tail.rho(i, i).real();
          }
          if (mode == GrbDetection::kErasureDecay) keep += tail.ionized;
        }
        GrbPoint& p = points[(static_cast<std::size_t>(inst) * nd + di) * kGrbDetections + m];
        p = {depths[di], static_cast<int>(inst), mode, keep > 0 ? hit / keep : 0.0, keep};
      }
    }
  });
  GrbData out;
  out.points = std::move(points);
  out.depths = depths;
  return out;
}

std::vector<double> GrbData::mean_success(GrbDetection d) const {
  std::vector<double> sum(depths.size(), 0.0);
  std::vector<int> count(depths.size(), 0);
  for (const GrbPoint& p : points) {
    if (p.detection != d) continue;
    const auto k = std::lower_bound(depths.begin(), depths.end(), p.depth) - depths.begin();
    sum[k] += p.success;
    ++count[k];
  }
  for (std::size_t k = 0; k < sum.size(); ++k) sum[k] /= std::max(1, count[k]);
  return sum;
}

std::vector<double> GrbData::success_sem(GrbDetection d) const {
  const std::vector<double> mean = mean_success(d);
  std::vector<double> ss(depths.size(), 0.0);
  std::vector<int> count(depths.size(), 0);
  for (const GrbPoint& p : points) {
    if (p.detection != d) continue;
    const auto k = std::lower_bound(depths.begin(), depths.end(), p.depth) - depths.begin();
    ss[k] += (p.success - mean[k]) * (p.success - mean[k]);
    ++count[k];
  }
  for (std::size_t k = 0; k < ss.size(); ++k)
    ss[k] = count[k] > 1 ? std::sqrt(ss[k] / (count[k] - 1) / count[k]) : 0.0;
  return ss;
}

analysis::RbFit fit_grb(const GrbData& data, GrbDetection d, analysis::RbOffset offset) {
  std::vector<double> l(data.depths.begin(), data.depths.end());
  const std::vector<double> y = data.mean_success(d);
  const std::vector<double> sem = data.success_sem(d);
  std::vector<double> w;
  const bool noisy = std::all_of(sem.begin(), sem.end(), [](double s) { return s > 0; });
  if (noisy)
    for (double s : sem) w.push_back(1.0 / (s * s));
  return analysis::fit_rb(l, y, offset, w);
}

void write_grb_csv(std::ostream& os, const GrbData& data) {
  os << "depth,instance,detection_mode,success\n";
  os.precision(12);
  for (const GrbPoint& p : data.points)
    os << p.depth << ',' << p.instance << ',' << detection_name(p.detection) << ',' << p.success << '\n';
}

namespace {

// diagonal projectors onto "only A in r0", "only B in r0", "both in r0"
std::array<Vector16, 3> ionization_masks() {
  std::array<Vector16, 3> m;
  for (auto& v : m) v.setZero();
  for (int i = 0; i < kDim; ++i) {
    const bool a = level_of(i, 0) == kR0, b = level_of(i, 1) == kR0;
    if (a && !b) m[0][i] = 1.0;
    if (b && !a) m[1][i] = 1.0;
    if (a && b) m[2][i] = 1.0;
  }
  return m;
}

// Quadratic forms of the no-jump propagator from slice boundary j to the gate
// end: norm, only-A-ionized, only-B-ionized, both-ionized.
struct EndForms {
  std::array<Matrix16, 4> q;
};

struct GateLoss {
  double single = 0.0;
  double corr = 0.0;
};

double form(const Matrix16& q, const Vector16& v) { return (v.adjoint() * q * v)(0, 0).real(); }

Vector16 jump(const Vector16& psi, int atom, int target) {
  Vector16 out = Vector16::Zero();
  for (int i = 0; i < kDim; ++i) {
    if (level_of(i, atom) != kR0) continue;
    const int j = atom == 0 ? pair_index(target, level_of(i, 1)) : pair_index(level_of(i, 0), target);
    out[j] += psi[i];
  }
  return out;
}

}  // namespace

LossStats correlated_loss_stats(const TogPulse& pulse, const decay::DecayModel& decay, const LossStatsOptions& opt) {
  pulse.validate();
  if (opt.gates < 1 || opt.sequences < 1) throw InvalidModelError("loss statistics need gates and sequences");
  const DecayRates rates = DecayRates::from_model(decay);
  const GateChannel gate(pulse, pulse.controls(), opt.blockade, rates, 1);
  const auto& slices = gate.slices();
  const int ns = static_cast<int>(slices.size());
  const auto masks = ionization_masks();

  std::vector<EndForms> forms(ns + 1);
  forms[ns].q[0] = Matrix16::Identity();
  for (int k = 0; k < 3; ++k) forms[ns].q[k + 1] = masks[k].asDiagonal();
  for (int j = ns - 1; j >= 0; --j)
    for (int k = 0; k < 4; ++k) forms[j].q[k] = slices[j].no_jump().adjoint() * forms[j + 1].q[k] * slices[j].no_jump();

  const double lost_share = rates.total() > 0 ? rates.to_decayed / rates.total() : 0.0;
  const std::array<std::pair<int, double>, 3> channels{
      {{kDecayed, rates.to_decayed}, {kM0, rates.to_m0}, {kM1, rates.to_m1}}};

  // loss probabilities of one gate for a normalized input; psi is replaced by
  // the normalized no-loss output
  const auto one_gate = [&](Vector16& psi) {
    GateLoss loss;
    Vector16 v = psi;
    for (int j = 0; j <= ns; ++j) {
      if (rates.total() > 0.0) {
        const double w = (j == 0 || j == ns ? 0.5 : 1.0) * pulse.dt();
        for (int atom = 0; atom < 2; ++atom)
          for (const auto& [target, rate] : channels) {
            if (rate == 0.0) continue;
            const Vector16 chi = std::sqrt(rate * w) * jump(v, atom, target);
            if (chi.squaredNorm() == 0.0) continue;
            const EndForms& f = forms[j];
            const double weight = chi.squaredNorm();
            const double kept = form(f.q[0], chi);
            const double later_decay = (weight - kept) * lost_share;
            const double r_a = form(f.q[1], chi), r_b = form(f.q[2], chi), r_ab = form(f.q[3], chi);
            if (target == kDecayed) {
              // this atom is gone; the partner is lost if it decays or is ionized
              const double partner = later_decay + (atom == 0 ? r_b : r_a) + r_ab;
              loss.corr += partner;
              loss.single += weight - partner;
            } else {
              loss.single += later_decay + r_a + r_b;
              loss.corr += r_ab;
            }
          }
      }
      if (j < ns) v = slices[j].no_jump() * v;
    }
    loss.single += v.cwiseAbs2().dot(masks[0].real()) + v.cwiseAbs2().dot(masks[1].real());
    loss.corr += v.cwiseAbs2().dot(masks[2].real());
    for (int i = 0; i < kDim; ++i)
      if (masks[0][i] != 0.0 || masks[1][i] != 0.0 || masks[2][i] != 0.0) v[i] = 0.0;
    psi = v.normalized();
    return loss;
  };

  std::vector<Matrix16> clifford_ops;
  for (const auto& u : clifford_group()) clifford_ops.push_back(global_op(u));
  const int g_max = opt.gates;
  std::vector<std::vector<double>> single(opt.sequences), corr(opt.sequences);
  parallel_for(opt.sequences, opt.threads, [&](Index s) {
    Rng rng(derive_seed(opt.seed, s));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(clifford_ops.size()) - 1);
    Vector16 psi = Vector16::Zero();
    psi[0] = 1.0;
    double alive = 1.0, cs = 0.0, cc = 0.0;
    for (int g = 0; g < g_max; ++g) {
      psi = clifford_ops[pick(rng)] * psi;
      const GateLoss l = one_gate(psi);
      cs += alive * l.single;
      cc += alive * l.corr;
      alive *= std::max(0.0, 1.0 - l.single - l.corr);
      single[s].push_back(cs);
      corr[s].push_back(cc);
    }
  });

  LossStats out;
  const auto slope = [&](const std::vector<double>& y) {
    double sxy = 0, sxx = 0;
    for (int g = 1; g <= g_max; ++g) {
      sxy += g * y[g - 1];
      sxx += double(g) * g;
    }
    return sxy / sxx;
  };
  std::vector<double> ps, pc;
  for (int s = 0; s < opt.sequences; ++s) {
    ps.push_back(slope(single[s]));
    pc.push_back(slope(corr[s]));
  }
  const auto mean_sem = [](const std::vector<double>& x, double& mean, double& sem) {
    mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double ss = 0;
    for (double v : x) ss += (v - mean) * (v - mean);
    sem = x.size() > 1 ? std::sqrt(ss / (x.size() - 1) / x.size()) : 0.0;
  };
  mean_sem(ps, out.p_single, out.p_single_err);
  mean_sem(pc, out.p_corr, out.p_corr_err);
  for (int g = 1; g <= g_max; ++g) {
    double a = 0, b = 0;
    for (int s = 0; s < opt.sequences; ++s) {
      a += single[s][g - 1];
      b += corr[s][g - 1];
    }
    out.gate_counts.push_back(g);
    out.single_cumulative.push_back(a / opt.sequences);
    out.corr_cumulative.push_back(b / opt.sequences);
  }
  return out;
}

}  // namespace ryd::gate

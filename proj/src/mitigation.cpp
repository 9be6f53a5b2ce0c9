#include "mitigation.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace ahmsim {

void NoiseChannel::validate() const {
  switch (kind) {
    case Kind::unitary:
      if (unitary.rows() != 9 || !is_unitary(unitary, 1e-10))
        throw InvalidArgumentError("NoiseChannel: unitary part must be a 9x9 unitary");
      break;
    case Kind::weyl_stochastic: {
      if (weyl_weights.size() != 81)
        throw InvalidArgumentError("NoiseChannel: need 81 Weyl weights");
      double sum = 0.0;
      for (double w : weyl_weights) {
        if (w < 0.0) throw InvalidArgumentError("NoiseChannel: negative Weyl weight");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidArgumentError("NoiseChannel: Weyl weights must sum to 1");
      break;
    }
    case Kind::depolarizing:
      if (lambda < 0.0 || lambda > 1.0)
        throw InvalidArgumentError("NoiseChannel: depolarizing strength in [0, 1]");
      break;
    case Kind::composite:
      for (const auto& p : parts) p.validate();
      break;
  }
}

NoiseChannel NoiseChannel::depolarizing(double lambda) {
  NoiseChannel n;
  n.kind = Kind::depolarizing;
  n.lambda = lambda;
  n.validate();
  return n;
}

NoiseChannel NoiseChannel::coherent_overrotation(const CMatrix& generator, double angle) {
  NoiseChannel n;
  n.kind = Kind::unitary;
  n.unitary = expm_minus_i_ht(generator, angle);
  n.validate();
  return n;
}

NoiseChannel NoiseChannel::weyl(const std::vector<double>& weights) {
  NoiseChannel n;
  n.kind = Kind::weyl_stochastic;
  n.weyl_weights = weights;
  n.validate();
  return n;
}

NoiseChannel NoiseChannel::composite_of(std::vector<NoiseChannel> parts) {
  NoiseChannel n;
  n.kind = Kind::composite;
  n.parts = std::move(parts);
  n.validate();
  return n;
}

CMatrix weyl2(int k1, int l1, int k2, int l2) { return kron(weyl(k1, l1), weyl(k2, l2)); }

void apply_noise(CMatrix& rho, const NoiseChannel& noise) {
  switch (noise.kind) {
    case NoiseChannel::Kind::unitary:
      rho = noise.unitary * rho * noise.unitary.adjoint();
      return;
    case NoiseChannel::Kind::weyl_stochastic: {
      CMatrix out = CMatrix::Zero(9, 9);
      for (int k1 = 0; k1 < 3; ++k1)
        for (int l1 = 0; l1 < 3; ++l1)
          for (int k2 = 0; k2 < 3; ++k2)
            for (int l2 = 0; l2 < 3; ++l2) {
              const double w = noise.weyl_weights[27 * k1 + 9 * l1 + 3 * k2 + l2];
              if (w == 0.0) continue;
              const CMatrix wop = weyl2(k1, l1, k2, l2);
              out += w * wop * rho * wop.adjoint();
            }
      rho = out;
      return;
    }
    case NoiseChannel::Kind::depolarizing: {
      const double tr = rho.trace().real();
      rho = noise.lambda * rho +
            (1.0 - noise.lambda) * tr / 9.0 * CMatrix::Identity(9, 9);
      return;
    }
    case NoiseChannel::Kind::composite:
      for (const auto& p : noise.parts) apply_noise(rho, p);
      return;
  }
}

void ConfusionMatrix::validate() const {
  for (int j = 0; j < 3; ++j) {
    double col = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (m(i, j) < 0.0) throw InvalidArgumentError("ConfusionMatrix: negative entry");
      col += m(i, j);
    }
    if (std::abs(col - 1.0) > 1e-9)
      throw InvalidArgumentError("ConfusionMatrix: columns must sum to 1");
  }
}

ConfusionMatrix ConfusionMatrix::identity() {
  ConfusionMatrix c;
  c.m = Eigen::Matrix3d::Identity();
  return c;
}

ConfusionMatrix ConfusionMatrix::symmetric(double error) {
  if (error < 0.0 || error > 1.0)
    throw InvalidArgumentError("ConfusionMatrix: error in [0, 1]");
  ConfusionMatrix c;
  c.m.setConstant(error / 2.0);
  for (int i = 0; i < 3; ++i) c.m(i, i) = 1.0 - error;
  c.validate();
  return c;
}

Eigen::MatrixXd lift_confusion(const std::vector<ConfusionMatrix>& per_site) {
  if (per_site.empty()) throw InvalidArgumentError("lift_confusion: empty site list");
  Eigen::MatrixXd out = per_site.front().m;
  for (size_t s = 1; s < per_site.size(); ++s) {
    const Eigen::MatrixXd& b = per_site[s].m;
    Eigen::MatrixXd next(out.rows() * 3, out.cols() * 3);
    for (long i = 0; i < out.rows(); ++i)
      for (long j = 0; j < out.cols(); ++j) next.block(3 * i, 3 * j, 3, 3) = out(i, j) * b;
    out = next;
  }
  return out;
}

std::vector<Circuit> randomized_compile(const Circuit& c, int n_twirls, uint64_t seed) {
  if (n_twirls < 1) throw InvalidArgumentError("randomized_compile: n_twirls >= 1");
  for (int idx : c.cycles) {
    const auto& g = c.gates[idx];
    if (g.kind != GateKind::csum && g.kind != GateKind::cz)
      throw CliffordError("randomized_compile: non-Clifford entangling cycle");
  }

  std::vector<Circuit> out;
  out.reserve(n_twirls);
  for (int tw = 0; tw < n_twirls; ++tw) {
    Rng rng(derive_seed(seed, tw));
    Circuit twirled;
    twirled.n_sites = c.n_sites;
    for (size_t i = 0; i < c.gates.size(); ++i) {
      const auto& g = c.gates[i];
      const bool cycle = is_entangling(g.kind);
      if (!cycle) {
        twirled.append(g);
        continue;
      }
      const int ka = rng.uniform_int(0, 2), la = rng.uniform_int(0, 2);
      const int kb = rng.uniform_int(0, 2), lb = rng.uniform_int(0, 2);
      twirled.append(weyl_gate(ka, la, g.targets[0]));
      twirled.append(weyl_gate(kb, lb, g.targets[1]));
      twirled.append(g);
      const auto conj = conjugate_weyls(materialize(g), {{ka, la}, {kb, lb}});
      // correction = [G (W1 x W2) G^+]^+ up to a global phase
      twirled.append(weyl_gate((3 - conj.out[0].k) % 3, (3 - conj.out[0].l) % 3, g.targets[0]));
      twirled.append(weyl_gate((3 - conj.out[1].k) % 3, (3 - conj.out[1].l) % 3, g.targets[1]));
    }
    out.push_back(std::move(twirled));
  }
  return out;
}

CMatrix circuit_unitary(const Circuit& c) {
  const long dim = model_dim(c.n_sites);
  if (dim > 81) throw InvalidArgumentError("circuit_unitary: circuit too large");
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& g : c.gates) {
    CMatrix full;
    if (g.targets.size() == 1) {
      full = embed_local(materialize(g), g.targets[0], c.n_sites);
    } else {
      // build by applying the gate to each basis column
      full = CMatrix::Zero(dim, dim);
      for (long col = 0; col < dim; ++col) {
        CVector e = CVector::Zero(dim);
        e[col] = 1.0;
        apply_gate(e, g, c.n_sites);
        full.col(col) = e;
      }
    }
    u = full * u;
  }
  return u;
}

CMatrix run_noisy_circuit(const Circuit& c, const CMatrix& rho0,
                          const std::optional<NoiseChannel>& noise) {
  if (c.n_sites != 2)
    throw InvalidArgumentError("run_noisy_circuit: two-qutrit circuits only");
  if (rho0.rows() != 9 || rho0.cols() != 9)
    throw InvalidArgumentError("run_noisy_circuit: 9x9 density matrix expected");
  CMatrix rho = rho0;
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const auto& g = c.gates[i];
    CMatrix u;
    if (g.targets.size() == 1) {
      u = embed_local(materialize(g), g.targets[0], 2);
    } else {
      Circuit tmp;
      tmp.n_sites = 2;
      tmp.append(g);
      u = circuit_unitary(tmp);
    }
    rho = u * rho * u.adjoint();
    if (noise && is_entangling(g.kind)) apply_noise(rho, *noise);
  }
  return rho;
}

namespace {

struct WeylEig {
  std::vector<CVector> vecs;  // one eigenvector per eigenvalue cluster
  std::vector<cx> vals;
  std::vector<CMatrix> projectors;
};

WeylEig weyl_eigensystem(const CMatrix& w) {
  Eigen::ComplexEigenSolver<CMatrix> es(w);
  WeylEig out;
  for (long i = 0; i < w.rows(); ++i) {
    const cx v = es.eigenvalues()(i);
    bool found = false;
    for (size_t k = 0; k < out.vals.size(); ++k)
      if (std::abs(out.vals[k] - v) < 1e-8) {
        out.projectors[k] += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
        found = true;
        break;
      }
    if (!found) {
      out.vals.push_back(v);
      out.vecs.push_back(es.eigenvectors().col(i));
      out.projectors.push_back(es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint());
    }
  }
  return out;
}

}  // namespace

CbResult cycle_benchmark(const GateSpec& cycle_gate, const NoiseChannel& noise,
                         const CbOptions& opt) {
  if (cycle_gate.kind != GateKind::csum && cycle_gate.kind != GateKind::cz)
    throw CliffordError("cycle_benchmark: cycle must be a Clifford entangling gate");
  if (opt.lengths.size() < 2)
    throw InvalidArgumentError("cycle_benchmark: need at least two sequence lengths");
  noise.validate();

  Circuit unit;
  unit.n_sites = 2;
  unit.append(cycle_gate);
  const CMatrix g = circuit_unitary(unit);

  // choose tracked channels: random non-identity Weyl pairs
  Rng chooser(derive_seed(opt.seed, 0xC0FFEE));
  std::vector<std::array<int, 4>> tracked;
  while (static_cast<int>(tracked.size()) < opt.n_channels) {
    std::array<int, 4> w = {chooser.uniform_int(0, 2), chooser.uniform_int(0, 2),
                            chooser.uniform_int(0, 2), chooser.uniform_int(0, 2)};
    if (w == std::array<int, 4>{0, 0, 0, 0}) continue;
    bool dup = false;
    for (const auto& x : tracked) dup |= x == w;
    if (!dup) tracked.push_back(w);
  }

  CbResult result;
  long task = 0;
  for (const auto& wlabel : tracked) {
    const CMatrix w0 = weyl2(wlabel[0], wlabel[1], wlabel[2], wlabel[3]);
    const auto eig = weyl_eigensystem(w0);
    // prepare the eigenstate with the largest-magnitude eigenvalue phase of W
    const CVector psi0 = eig.vecs.front();
    const cx mu0 = eig.vals.front();

    std::vector<double> xs, ys;
    for (int len : opt.lengths) {
      double acc = 0.0;
      for (int s = 0; s < opt.n_sequences; ++s) {
        Rng rng(derive_seed(opt.seed, ++task));
        CMatrix rho = psi0 * psi0.adjoint();
        std::vector<WeylLabel> frame = {{wlabel[0], wlabel[1]}, {wlabel[2], wlabel[3]}};
        cx frame_phase = 1.0;
        for (int n = 0; n < len; ++n) {
          // random Weyl dressing, ideal net effect = g per application
          const int ka = rng.uniform_int(0, 2), la = rng.uniform_int(0, 2);
          const int kb = rng.uniform_int(0, 2), lb = rng.uniform_int(0, 2);
          const CMatrix b = weyl2(ka, la, kb, lb);
          rho = b * rho * b.adjoint();
          rho = g * rho * g.adjoint();
          apply_noise(rho, noise);
          const auto corr = conjugate_weyls(g, {{ka, la}, {kb, lb}});
          // correction Weyl; global phases cancel in the conjugation
          const CMatrix cmat =
              weyl2(corr.out[0].k, corr.out[0].l, corr.out[1].k, corr.out[1].l).adjoint();
          rho = cmat * rho * cmat.adjoint();
          // tracked Weyl advances through the ideal cycle
          const auto adv = conjugate_weyls(g, frame);
          frame = adv.out;
          frame_phase *= adv.phase;
        }
        const CMatrix wn = weyl2(frame[0].k, frame[0].l, frame[1].k, frame[1].l);
        const auto eign = weyl_eigensystem(wn);
        // sample eigenvalue-sector outcomes
        std::vector<double> probs;
        for (const auto& p : eign.projectors)
          probs.push_back(std::max(0.0, (p * rho).trace().real()));
        double norm = std::accumulate(probs.begin(), probs.end(), 0.0);
        for (auto& p : probs) p /= norm;
        const auto counts = sample_shots(probs, opt.shots, derive_seed(opt.seed, 7777 + task));
        cx est = 0.0;
        for (size_t k = 0; k < counts.size(); ++k)
          est += static_cast<double>(counts[k]) * eign.vals[k];
        est /= static_cast<double>(opt.shots);
        // ideal value after n cycles is mu0 / frame_phase
        acc += (est * frame_phase / mu0).real();
      }
      xs.push_back(len);
      ys.push_back(acc / opt.n_sequences);
    }
    // log-linear fit of y = A p^N
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n_ok = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      if (ys[i] <= 0.0) continue;
      const double ly = std::log(ys[i]);
      sx += xs[i];
      sy += ly;
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ly;
      ++n_ok;
    }
    if (n_ok < 2) throw FitError("cycle_benchmark: decay fit diverged (nonpositive data)");
    const double denom = n_ok * sxx - sx * sx;
    const double slope = (n_ok * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / n_ok;
    CbChannelFit fit;
    fit.weyl = wlabel;
    fit.p = std::exp(slope);
    fit.a = std::exp(inter);
    // scatter of per-length residuals as the uncertainty proxy
    double ss = 0.0;
    for (size_t i = 0; i < xs.size(); ++i)
      if (ys[i] > 0.0) {
        const double r = std::log(ys[i]) - (inter + slope * xs[i]);
        ss += r * r;
      }
    fit.sigma_p = fit.p * std::sqrt(ss / std::max(1, n_ok - 2)) /
                  std::sqrt(std::max(1.0, sxx - sx * sx / n_ok));
    result.channels.push_back(fit);
  }

  double mean = 0.0;
  for (const auto& ch : result.channels) mean += ch.p;
  mean /= result.channels.size();
  double var = 0.0;
  for (const auto& ch : result.channels) var += (ch.p - mean) * (ch.p - mean);
  result.lambda_hat = mean;
  result.sigma_lambda =
      std::sqrt(var / std::max<size_t>(1, result.channels.size() - 1) /
                result.channels.size());
  return result;
}

PurifiedValue purify_expectation(double raw, double sigma_raw, double lambda_hat,
                                 int n_cycles, double floor) {
  if (lambda_hat <= 0.0 || lambda_hat > 1.0)
    throw InvalidArgumentError("purify_expectation: lambda_hat in (0, 1]");
  if (n_cycles < 0) throw InvalidArgumentError("purify_expectation: negative cycle count");
  const double corr = std::pow(lambda_hat, n_cycles);
  PurifiedValue out;
  out.value = raw / corr;
  out.sigma = sigma_raw / corr;
  out.unreliable = corr < floor;
  return out;
}

std::vector<long> sample_shots(const std::vector<double>& probabilities, long n_shots,
                               uint64_t seed) {
  double sum = 0.0;
  for (double p : probabilities) {
    if (p < -1e-12) throw InvalidArgumentError("sample_shots: negative probability");
    sum += std::max(p, 0.0);
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw InvalidArgumentError("sample_shots: probabilities must sum to 1");
  std::vector<double> cdf;
  cdf.reserve(probabilities.size());
  double acc = 0.0;
  for (double p : probabilities) {
    acc += std::max(p, 0.0) / sum;
    cdf.push_back(acc);
  }
  cdf.back() = 1.0;
  Rng rng(seed);
  std::vector<long> counts(probabilities.size(), 0);
  for (long s = 0; s < n_shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    ++counts[std::distance(cdf.begin(), it)];
  }
  return counts;
}

ReadoutMitigated mitigate_readout(const std::vector<long>& counts,
                                  const Eigen::MatrixXd& confusion) {
  const long d = confusion.rows();
  if (static_cast<long>(counts.size()) != d)
    throw InvalidArgumentError("mitigate_readout: count/confusion size mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(confusion);
  if (!lu.isInvertible())
    throw InvalidArgumentError("mitigate_readout: singular confusion matrix");
  long total = 0;
  for (long c : counts) total += c;
  if (total <= 0) throw InvalidArgumentError("mitigate_readout: empty counts");
  Eigen::VectorXd meas(d);
  for (long i = 0; i < d; ++i) meas(i) = static_cast<double>(counts[i]) / total;
  const Eigen::VectorXd inverted = lu.solve(meas);

  ReadoutMitigated out;
  out.raw_inverted.assign(inverted.data(), inverted.data() + d);
  double sum = 0.0;
  out.probabilities.resize(d);
  for (long i = 0; i < d; ++i) {
    out.probabilities[i] = std::max(inverted(i), 0.0);
    sum += out.probabilities[i];
  }
  if (sum <= 0.0) throw NumericalError("mitigate_readout: all-zero after clipping");
  for (auto& p : out.probabilities) p /= sum;
  return out;
}

Eigen::MatrixXcd weyl_transfer_matrix(const std::function<CMatrix(const CMatrix&)>& channel) {
  Eigen::MatrixXcd r(81, 81);
  std::vector<CMatrix> basis;
  basis.reserve(81);
  for (int k1 = 0; k1 < 3; ++k1)
    for (int l1 = 0; l1 < 3; ++l1)
      for (int k2 = 0; k2 < 3; ++k2)
        for (int l2 = 0; l2 < 3; ++l2) basis.push_back(weyl2(k1, l1, k2, l2));
  for (int w = 0; w < 81; ++w) {
    const CMatrix img = channel(basis[w]);
    for (int v = 0; v < 81; ++v) r(v, w) = (basis[v].adjoint() * img).trace() / 9.0;
  }
  return r;
}

}  // namespace ahmsim

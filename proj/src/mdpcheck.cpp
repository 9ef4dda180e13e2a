#include "adac/mdpcheck.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace adac::mdp {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// (s,a) -> (s', pi(s')) transition operator on Q-vectors of length S*A.
Mat policy_operator(const std::vector<int>& pi, const FiniteMdp& m) {
  Mat P = Mat::Zero(m.S * m.A, m.S * m.A);
  for (int s = 0; s < m.S; ++s)
    for (int a = 0; a < m.A; ++a)
      for (int s2 = 0; s2 < m.S; ++s2)
        P(s * m.A + a, s2 * m.A + pi[s2]) += m.p(s, a, s2);
  return P;
}

Vec flatten(const Matrix& t) {
  Vec v(t.rows * t.cols);
  for (std::size_t i = 0; i < t.size(); ++i) v(static_cast<int>(i)) = t.a[i];
  return v;
}

Matrix unflatten(const Vec& v, int S, int A) {
  Matrix t(S, A);
  for (int i = 0; i < S * A; ++i) t.a[i] = v(i);
  return t;
}

Vec resolve(const Mat& Ppi, double gamma, const Vec& x) {
  const int n = static_cast<int>(x.size());
  return (Mat::Identity(n, n) - gamma * Ppi).partialPivLu().solve(x);
}

}  // namespace

void FiniteMdp::validate() const {
  if (S < 1 || A < 1) throw PreconditionError("FiniteMdp: empty state/action space");
  if (gamma < 0.0 || gamma >= 1.0)
    throw PreconditionError("FiniteMdp: gamma must be in [0, 1)");
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double sum = 0.0;
      for (int s2 = 0; s2 < S; ++s2) {
        const double v = p(s, a, s2);
        if (v < 0.0) throw PreconditionError("FiniteMdp: negative transition entry");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw PreconditionError("FiniteMdp: P(s,a,.) does not sum to 1");
      if (Rprime(s, a) < R(s, a))
        throw PreconditionError("FiniteMdp: R'(s,a) < R(s,a) violates R' >= R");
    }
  double b = 0.0;
  for (double v : beta0) {
    if (v < 0.0) throw PreconditionError("FiniteMdp: negative beta0 entry");
    b += v;
  }
  if (std::abs(b - 1.0) > 1e-12)
    throw PreconditionError("FiniteMdp: beta0 does not sum to 1");
}

Matrix one_hot_policy(const std::vector<int>& pi, int A) {
  Matrix t(pi.size(), A);
  for (std::size_t s = 0; s < pi.size(); ++s) t(s, pi[s]) = 1.0;
  return t;
}

QTable bellman_policy(const QTable& Q, const Matrix& pi, const Matrix& R,
                      const FiniteMdp& mdp) {
  if (pi.rows != static_cast<std::size_t>(mdp.S) ||
      pi.cols != static_cast<std::size_t>(mdp.A))
    throw PreconditionError("bellman_policy: pi has wrong shape");
  for (int s = 0; s < mdp.S; ++s) {
    double sum = 0.0;
    for (int a = 0; a < mdp.A; ++a) {
      if (pi(s, a) < 0.0) throw PreconditionError("bellman_policy: pi has negative entry");
      sum += pi(s, a);
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw PreconditionError("bellman_policy: pi rows must sum to 1");
  }
  // Expected next-state value under pi.
  std::vector<double> v(mdp.S, 0.0);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a) v[s] += pi(s, a) * Q(s, a);
  QTable out(mdp.S, mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a) {
      double exp_v = 0.0;
      for (int s2 = 0; s2 < mdp.S; ++s2) exp_v += mdp.p(s, a, s2) * v[s2];
      out(s, a) = R(s, a) + mdp.gamma * exp_v;
    }
  return out;
}

QTable bellman_max(const QTable& Q, const Matrix& R, const FiniteMdp& mdp) {
  std::vector<double> v(mdp.S);
  for (int s = 0; s < mdp.S; ++s) {
    double best = Q(s, 0);
    for (int a = 1; a < mdp.A; ++a) best = std::max(best, Q(s, a));
    v[s] = best;
  }
  QTable out(mdp.S, mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a) {
      double exp_v = 0.0;
      for (int s2 = 0; s2 < mdp.S; ++s2) exp_v += mdp.p(s, a, s2) * v[s2];
      out(s, a) = R(s, a) + mdp.gamma * exp_v;
    }
  return out;
}

QTable fixed_point(const std::vector<int>& pi, const Matrix& R, const FiniteMdp& mdp) {
  const Mat Ppi = policy_operator(pi, mdp);
  return unflatten(resolve(Ppi, mdp.gamma, flatten(R)), mdp.S, mdp.A);
}

std::vector<double> occupancy(const std::vector<int>& pi, const FiniteMdp& mdp) {
  const Mat Ppi = policy_operator(pi, mdp);
  Vec b(mdp.S * mdp.A);
  for (int i = 0; i < mdp.S * mdp.A; ++i) b(i) = mdp.beta0[i];
  const int n = mdp.S * mdp.A;
  Vec rho = (Mat::Identity(n, n) - mdp.gamma * Ppi.transpose()).partialPivLu().solve(b);
  rho *= (1.0 - mdp.gamma);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = rho(i);
  return out;
}

std::vector<int> greedy(const QTable& Q) {
  std::vector<int> pi(Q.rows);
  for (std::size_t s = 0; s < Q.rows; ++s) {
    int best = 0;
    for (std::size_t a = 1; a < Q.cols; ++a)
      if (Q(s, a) > Q(s, best)) best = static_cast<int>(a);
    pi[s] = best;
  }
  return pi;
}

std::vector<int> policy_iteration(const Matrix& R, const FiniteMdp& mdp, QTable* Q) {
  std::vector<int> pi(mdp.S, 0);
  QTable q;
  for (int iter = 0; iter < 1000; ++iter) {
    q = fixed_point(pi, R, mdp);
    std::vector<int> next = greedy(q);
    if (next == pi) break;
    pi = next;
  }
  if (Q) *Q = q;
  return pi;
}

Theorem1Report verify_theorem1(const FiniteMdp& mdp, const QTable& Q_seed) {
  mdp.validate();
  const std::vector<int> pi = greedy(Q_seed);
  const QTable q_pi_rp = fixed_point(pi, mdp.Rprime, mdp);
  const std::vector<int> mu = greedy(q_pi_rp);

  const std::vector<double> rho_pi = occupancy(pi, mdp);
  const std::vector<double> rho_mu = occupancy(mu, mdp);
  const QTable tmax = bellman_max(Q_seed, mdp.R, mdp);

  auto expect = [&](const std::vector<double>& rho, auto&& f) {
    double e = 0.0;
    for (int s = 0; s < mdp.S; ++s)
      for (int a = 0; a < mdp.A; ++a) e += rho[s * mdp.A + a] * f(s, a);
    return e;
  };

  Theorem1Report rep;
  auto delta = [&](int s, int a) { return tmax(s, a) - Q_seed(s, a); };
  rep.e_pi_delta = expect(rho_pi, delta);
  rep.e_mu_delta = expect(rho_mu, delta);
  rep.e_pi_r = expect(rho_pi, [&](int s, int a) { return mdp.R(s, a); });
  rep.e_mu_r = expect(rho_mu, [&](int s, int a) { return mdp.R(s, a); });
  rep.e_pi_rin =
      expect(rho_pi, [&](int s, int a) { return mdp.Rprime(s, a) - mdp.R(s, a); });

  rep.stability_printed = rep.e_pi_delta - rep.e_mu_delta - (rep.e_pi_r - rep.e_mu_r);
  rep.stability_proof = rep.e_pi_delta - rep.e_mu_delta - (rep.e_mu_r - rep.e_pi_r);
  rep.effectiveness = rep.e_mu_delta - rep.e_pi_delta + rep.e_pi_rin;
  return rep;
}

Lemma1Report verify_lemma1(const FiniteMdp& mdp, const QTable& Q_seed,
                           Lemma1Reading reading) {
  mdp.validate();
  const std::vector<int> pi = greedy(Q_seed);
  const QTable q_pi_rp = fixed_point(pi, mdp.Rprime, mdp);
  const std::vector<int> mu = greedy(q_pi_rp);

  const Mat Ppi = policy_operator(pi, mdp);
  const Mat Pmu = policy_operator(mu, mdp);
  const int n = mdp.S * mdp.A;
  const Mat Api = (Mat::Identity(n, n) - mdp.gamma * Ppi).inverse();
  const Mat Amu = (Mat::Identity(n, n) - mdp.gamma * Pmu).inverse();

  const Vec r = flatten(mdp.R);
  const Vec rp = flatten(mdp.Rprime);
  const Vec q = flatten(Q_seed);
  const Vec q_pi_star = Api * r;
  const Vec q_mu_rp = (reading == Lemma1Reading::kMu) ? Vec(Amu * rp) : Vec(Api * rp);

  const Vec tmax_q = flatten(bellman_max(Q_seed, mdp.R, mdp));
  const Vec tmu_rp_q = flatten(
      bellman_policy(Q_seed, one_hot_policy(mu, mdp.A), mdp.Rprime, mdp));

  const Vec lhs = q_mu_rp - q_pi_star;
  const Vec rhs = (Amu - Api) * (tmax_q - q) - Amu * (tmax_q - tmu_rp_q);

  Lemma1Report rep;
  rep.max_abs_discrepancy = (lhs - rhs).cwiseAbs().maxCoeff();
  return rep;
}

FiniteMdp random_mdp(Rng& rng, int max_states, int max_actions) {
  FiniteMdp m;
  m.S = 2 + static_cast<int>(rng.below(max_states - 1));
  m.A = 2 + static_cast<int>(rng.below(max_actions - 1));
  m.gamma = rng.uniform(0.5, 0.95);
  m.P.resize(m.S * m.A * m.S);
  // Dirichlet(1) rows via normalized exponentials.
  for (int sa = 0; sa < m.S * m.A; ++sa) {
    double sum = 0.0;
    for (int s2 = 0; s2 < m.S; ++s2) {
      double e = -std::log(1.0 - rng.uniform());
      m.P[sa * m.S + s2] = e;
      sum += e;
    }
    for (int s2 = 0; s2 < m.S; ++s2) m.P[sa * m.S + s2] /= sum;
  }
  m.R = Matrix(m.S, m.A);
  m.Rprime = Matrix(m.S, m.A);
  for (std::size_t i = 0; i < m.R.size(); ++i) {
    m.R.a[i] = rng.uniform();
    m.Rprime.a[i] = m.R.a[i] + 0.5 * rng.uniform();
  }
  m.beta0.resize(m.S * m.A);
  double sum = 0.0;
  for (auto& v : m.beta0) {
    v = -std::log(1.0 - rng.uniform());
    sum += v;
  }
  for (auto& v : m.beta0) v /= sum;
  return m;
}

}  // namespace adac::mdp

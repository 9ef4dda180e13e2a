#pragma once

#include <stdexcept>
#include <vector>

#include "adac/matrix.hpp"
#include "adac/rng.hpp"

namespace adac::mdp {

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Explicit tabular MDP with two reward tables: the environment reward R and
// the augmented reward R' >= R. beta0 is an initial state-action distribution.
struct FiniteMdp {
  int S = 0;
  int A = 0;
  double gamma = 0.9;
  std::vector<double> P;      // S*A*S, P[(s*A+a)*S + s'] = P(s'|s,a)
  Matrix R;                   // S x A
  Matrix Rprime;              // S x A
  std::vector<double> beta0;  // length S*A, sums to 1

  double p(int s, int a, int s2) const { return P[(s * A + a) * S + s2]; }
  void validate() const;  // throws PreconditionError
};

using QTable = Matrix;  // S x A

// Deterministic policies are action indices per state; stochastic policies
// are S x A row-stochastic tables.
Matrix one_hot_policy(const std::vector<int>& pi, int A);

// (T^pi_R Q)(s,a) = R(s,a) + gamma * sum_s' P(s'|s,a) * sum_a' pi(a'|s') Q(s',a').
QTable bellman_policy(const QTable& Q, const Matrix& pi, const Matrix& R,
                      const FiniteMdp& mdp);

// (T^max_R Q)(s,a) = R(s,a) + gamma * sum_s' P(s'|s,a) * max_a' Q(s',a').
QTable bellman_max(const QTable& Q, const Matrix& R, const FiniteMdp& mdp);

// Exact fixed point of T^pi_R by direct linear solve.
QTable fixed_point(const std::vector<int>& pi, const Matrix& R, const FiniteMdp& mdp);

// Normalized discounted state-action occupancy of pi from beta0; sums to 1.
std::vector<double> occupancy(const std::vector<int>& pi, const FiniteMdp& mdp);

// Greedy policy; ties broken by the lowest action index.
std::vector<int> greedy(const QTable& Q);

// Policy iteration to convergence; returns the final policy, fills Q with its
// fixed point (the optimal Q).
std::vector<int> policy_iteration(const Matrix& R, const FiniteMdp& mdp, QTable* Q);

struct Theorem1Report {
  // Margins are lhs - rhs of each bound; >= -tol means the bound holds.
  double stability_printed = 0.0;  // Eq. 4 as printed: + E_pi[R] - E_mu[R]
  double stability_proof = 0.0;    // Eq. 4 as derived: + E_mu[R] - E_pi[R]
  double effectiveness = 0.0;      // Eq. 5
  double e_pi_delta = 0.0, e_mu_delta = 0.0;
  double e_pi_r = 0.0, e_mu_r = 0.0, e_pi_rin = 0.0;

  bool holds(double tol) const {
    return stability_proof >= -tol && effectiveness >= -tol;
  }
};

// Checks Theorem 1's two lower bounds for pi = greedy(Q_seed),
// mu = greedy(fixed_point(pi, R')). Throws PreconditionError if R' < R.
Theorem1Report verify_theorem1(const FiniteMdp& mdp, const QTable& Q_seed);

enum class Lemma1Reading {
  kMu,  // Q^mu_{R'} is the fixed point of T^mu_{R'} (the lemma's definition)
  kPi,  // Q^mu_{R'} read as the fixed point of T^pi_{R'} (the theorem's text)
};

struct Lemma1Report {
  double max_abs_discrepancy = 0.0;  // max |lhs - rhs| over the S*A entries
};

Lemma1Report verify_lemma1(const FiniteMdp& mdp, const QTable& Q_seed,
                           Lemma1Reading reading);

// Dirichlet(1) transition rows, R ~ U[0,1], R' = R + U[0, 0.5],
// beta0 ~ Dirichlet(1), gamma ~ U[0.5, 0.95], S in [2, maxS], A in [2, maxA].
FiniteMdp random_mdp(Rng& rng, int max_states = 6, int max_actions = 4);

}  // namespace adac::mdp

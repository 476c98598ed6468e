#pragma once

// Aggregation-based algebraic multigrid.
//
// ScalarAmg handles scalar SPD-like matrices (pressure Laplacian, Schur
// matrices, mesh extension). SaddleAmg handles the colocated P1-P1 block
// systems [A B1^T; B2 -C] with dof layout [3m velocity; m pressure]: every
// vertex aggregate carries three velocity dofs and one pressure dof, the
// coarse operators are Galerkin products and the coarse pressure block is
// scaled by c_scale per level.
//
// Rows holding only a diagonal entry (eliminated Dirichlet dofs) are left out
// of the coarse spaces and solved directly by every smoother.

#include <Eigen/LU>
#include <span>
#include <vector>

#include "fsikit/newton.hpp"
#include "fsikit/sparse.hpp"

namespace fsi::amg {

struct Aggregates {
  std::vector<Index> of;  ///< node -> aggregate
  Index count = 0;
  std::vector<Index> sizes() const;
};

/// Repeated pairwise matching on a weighted node graph. Weights are taken as
/// |g_ij| + |g_ji|, the diagonal is ignored. Each pass pairs every unmatched
/// node with its strongest unmatched neighbour (nodes without one stay
/// single), so `passes` passes give aggregates of at most 2^passes nodes.
Aggregates pairwise_aggregation(const SparseMatrix& graph, int passes);

/// Rows whose off-diagonal entries are all zero.
std::vector<char> trivial_rows(const SparseMatrix& a);

/// Galerkin product P^T A P for a piecewise-constant P given as a map
/// fine dof -> coarse dof (-1: not represented). Coarse rows that receive no
/// entry get a unit diagonal.
SparseMatrix galerkin(const SparseMatrix& a, std::span<const Index> map, Index coarse_size);

/// The prolongation of `galerkin` as an explicit matrix.
SparseMatrix prolongation(std::span<const Index> map, Index coarse_size);

struct ScalarAmgOptions {
  Index coarse_size = 300;
  int passes = 3;
  int sweeps = 1;  ///< symmetric Gauss-Seidel sweeps before and after
  /// Dofs per node (dof = block * node + component); components of a node
  /// share an aggregate.
  int block = 1;
};

class ScalarAmg {
 public:
  ScalarAmg() = default;
  explicit ScalarAmg(const SparseMatrix& a, const ScalarAmgOptions& opt = {});

  int num_levels() const { return static_cast<int>(levels_.size()); }
  Index size(int level) const { return levels_[level].a.rows; }
  const SparseMatrix& matrix(int level) const { return levels_[level].a; }

  /// One V-cycle improving x for A x = b.
  void vcycle(std::span<const double> b, std::span<double> x) const;
  /// `cycles` V-cycles from x = 0 (a fixed linear operator in b).
  void apply(std::span<const double> b, std::span<double> x, int cycles) const;

 private:
  struct Level {
    SparseMatrix a;
    std::vector<Index> map;  ///< dof -> next-level dof
    Index next = 0;
  };
  void cycle(int l, std::span<const double> b, std::span<double> x) const;

  ScalarAmgOptions opt_;
  std::vector<Level> levels_;
  Eigen::PartialPivLU<Eigen::MatrixXd> coarse_;
};

enum class Smoother { BraessSarazin, Vanka };

struct SaddleAmgOptions {
  Smoother smoother = Smoother::BraessSarazin;
  int steps = 8;           ///< pre- and post-smoothing steps
  double omega = 0.78;     ///< Vanka relaxation
  double c_scale = 4.0;    ///< coarse pressure block growth per level
  Index coarse_size = 300;
  int passes = 3;
  int schur_cycles = 2;    ///< Braess-Sarazin: V-cycles on the Schur system
  bool exact_schur = false;
};

class SaddleAmg {
 public:
  SaddleAmg(const SparseMatrix& K, Index m, const SaddleAmgOptions& opt);

  /// New values on the finest level with the same aggregates; coarse levels
  /// and smoothers are recomputed.
  void refresh(const SparseMatrix& K);

  const SaddleAmgOptions& options() const { return opt_; }
  void set_steps(int steps) { opt_.steps = steps; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  Index size(int level) const { return levels_[level].K.rows; }
  Index nodes(int level) const { return levels_[level].m; }
  const SparseMatrix& matrix(int level) const { return levels_[level].K; }
  /// Prolongation from level l + 1 to level l.
  SparseMatrix prolongation(int l) const;

  void smooth(int level, std::span<const double> b, std::span<double> x, int steps) const;
  void vcycle(std::span<const double> b, std::span<double> x) const;
  /// Stationary V-cycle iteration from x until |b - K x| <= tol |b|.
  LinearResult solve(std::span<const double> b, std::span<double> x, double tol, int max_cycles) const;

 private:
  struct Patch {
    std::vector<Index> dofs;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  };
  struct Level {
    Index m = 0;
    SparseMatrix K;
    std::vector<char> trivial;
    std::vector<Index> map;  ///< dof -> next-level dof
    Index next_m = 0;
    // Braess-Sarazin
    Vec inv_at;
    SparseMatrix b1t, b2;
    SparseMatrix schur;
    ScalarAmg schur_amg;
    Eigen::PartialPivLU<Eigen::MatrixXd> schur_lu;
    bool schur_dense = false;
    // Vanka
    std::vector<Patch> patches;
  };

  void build_coarse();
  void setup_smoother(Level& lv) const;
  void braess_sarazin(const Level& lv, std::span<const double> b, std::span<double> x, int steps) const;
  void vanka(const Level& lv, std::span<const double> b, std::span<double> x, int steps) const;
  void cycle(int l, std::span<const double> b, std::span<double> x) const;

  SaddleAmgOptions opt_;
  std::vector<Level> levels_;
  Eigen::PartialPivLU<Eigen::MatrixXd> coarse_;
};

/// Node graph of a block system: |A| summed over the 3x3 vertex blocks plus
/// |C| between pressure dofs.
SparseMatrix saddle_node_graph(const SparseMatrix& K, Index m);

}  // namespace fsi::amg

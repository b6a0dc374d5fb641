#ifndef INVGP_OPERATORS_HPP
#define INVGP_OPERATORS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgp/common.hpp"
#include "invgp/quadrature.hpp"

namespace invgp {

// Symbol of a composition operator: a deterministic map D -> D.
struct SymbolMap {
  std::function<Vec(const Vec&)> map;
  std::string label;
  nlohmann::json spec;  // null when built from an opaque closure

  Vec operator()(const Vec& x) const { return map(x); }
  bool serializable() const { return !spec.is_null(); }
};

SymbolMap identity_symbol(int dim);
SymbolMap rotation_symbol(double angle);  // 2-D rotation about the origin
SymbolMap negation_symbol(int dim);
// x -> a with the i-th coordinate replaced by x_i (0-based index).
SymbolMap coordinate_slot_symbol(int index, const Vec& anchor);
SymbolMap constant_symbol(const Vec& anchor);

// Linear operator acting on functions through pointwise rules.  Covers
// combinations of composition operators, quadrature centering, and
// finite-difference differential operators; invariance checking and the
// experiment gallery are written against this interface.
class PathOperator {
 public:
  virtual ~PathOperator() = default;
  virtual double apply(const std::function<double(const Vec&)>& f,
                       const Vec& x) const = 0;
  virtual std::string name() const = 0;
  // Distance from the box boundary required to evaluate (fd stencils).
  virtual double boundary_margin() const { return 0.0; }
};

// T = sum_i alpha_i f(v_i(.)).
class CompositionCombination : public PathOperator {
 public:
  CompositionCombination(std::vector<SymbolMap> symbols, Vec weights);

  double apply(const std::function<double(const Vec&)>& f, const Vec& x) const override;

  // As apply, but errors if any symbol image leaves `box`.
  double apply_checked(const std::function<double(const Vec&)>& f, const Vec& x,
                       const Box& box, double slack = 1e-9) const;

  std::string name() const override { return "composition_combination"; }

  const std::vector<SymbolMap>& symbols() const { return symbols_; }
  const Vec& weights() const { return weights_; }
  int size() const { return static_cast<int>(symbols_.size()); }

  nlohmann::json spec() const;

 private:
  std::vector<SymbolMap> symbols_;
  Vec weights_;
};

// T(f) = f - integral of f against a probability measure.
class CenteringOperator : public PathOperator {
 public:
  explicit CenteringOperator(QuadratureMeasure nu);

  double apply(const std::function<double(const Vec&)>& f, const Vec& x) const override;
  std::string name() const override { return "centering"; }
  const QuadratureMeasure& measure() const { return nu_; }

 private:
  QuadratureMeasure nu_;
};

// Finite-difference differential operators whose fixed points are the
// ODE/PDE solution spaces of interest.
class DifferentialPathOperator : public PathOperator {
 public:
  enum class Tag {
    kNegSecondDerivative,  // T(f) = -f''   (fixed points: f'' + f = 0)
    kLaplacianShift,       // T(f) = f + Laplacian(f)  (fixed points: harmonic f)
  };

  DifferentialPathOperator(Tag tag, double h = 1e-3, int order = 2);

  double apply(const std::function<double(const Vec&)>& f, const Vec& x) const override;
  std::string name() const override;
  double boundary_margin() const override { return (order_ == 4 ? 2.0 : 1.0) * h_; }
  Tag tag() const { return tag_; }

 private:
  Tag tag_;
  double h_;
  int order_;
};

// Finite list of symbols forming a group under composition.  Closure and the
// presence of the identity are verified on samples, not symbolically.
struct GroupAction {
  std::vector<SymbolMap> elements;

  int size() const { return static_cast<int>(elements.size()); }
};

// Builds a GroupAction, verifying on `n_samples` random points of `box` that
// the identity is present and that compositions of elements match some
// element within tol.
GroupAction make_group_action(std::vector<SymbolMap> elements, const Box& box,
                              int n_samples = 20, double tol = 1e-10,
                              std::uint64_t seed = 7);

// Cyclic rotation group of order n about the origin (2-D).
GroupAction rotation_group(int n, int samples_dim = 2);

// Operator whose fixed points are the additive functions:
// symbols v_1..v_d slot each coordinate into the anchor, v_{d+1} is the
// constant anchor map, weights (1,...,1,-(d-1)).
CompositionCombination additivity_operator(const Vec& anchor);

double apply_T_to_function(const CompositionCombination& T,
                           const std::function<double(const Vec&)>& f, const Vec& x);

// Orbit closure of a point set under a symbol list: repeatedly applies the
// symbols and appends unseen images until closed (or max_points reached).
Mat orbit_closure(const Mat& seed_points, const std::vector<SymbolMap>& symbols,
                  double match_tol = 1e-9, int max_points = 100000);

}  // namespace invgp

#endif

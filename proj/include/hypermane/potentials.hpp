#pragma once

#include <string>
#include <variant>
#include <vector>

#include "hypermane/config_geometry.hpp"
#include "hypermane/envelope.hpp"

namespace hypermane {

struct Newtonian {};
struct Homogeneous {
  double alpha = 1.0;
};
struct QuasiHomogeneous {
  double alpha = 2.0;
  double beta = 1.0;
  double delta = 1.0;
};
struct LennardJones {
  double A = 1.0;
  double B = 1.0;
};
struct SeeligerYukawa {
  double A = 1.0;
  double B = 1.0;
};
struct MucketTreder {
  double A = 1.0;
  double B = 1.0;
};
struct Logarithmic {};
struct ZeroPair {};

using PairKind = std::variant<Newtonian, Homogeneous, QuasiHomogeneous, LennardJones, SeeligerYukawa,
                              MucketTreder, Logarithmic, ZeroPair>;

/// phi(r), phi'(r), phi''(r) of the radial profile, before any mass factor.
struct Radial {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

Radial radial_profile(const PairKind& kind, double r);
std::string kind_name(const PairKind& kind);
void validate_kind(const PairKind& kind);
/// Kinds whose pair term carries the factor m_i m_j.
bool mass_scaled(const PairKind& kind);
/// Kinds that can go negative and are clamped at zero inside the action.
bool clamped_in_action(const PairKind& kind);
bool is_zero_kind(const PairKind& kind);

/// Whether to use the raw pair terms or max(F_ij, 0).
enum class Branch { raw, clamped };

/// Separations below this raise SingularEvaluationError.
inline constexpr double kNearCollisionCutoff = 1e-9;

/// F = sum over pairs of F_ij, with a far-field envelope f.
class PotentialSpec {
 public:
  PotentialSpec() = default;
  /// Same kind for every pair; the envelope defaults to the canonical one for that kind.
  PotentialSpec(Layout layout, const PairKind& kind);
  PotentialSpec(Layout layout, const PairKind& kind, Envelope envelope);

  void set_pair(int i, int j, const PairKind& kind);
  void set_envelope(Envelope envelope);
  void use_canonical_envelope();
  void set_near_region_width(double w);

  const Layout& layout() const { return layout_; }
  const PairKind& pair(int i, int j) const;
  const Envelope& envelope() const { return envelope_; }
  bool envelope_is_canonical() const { return canonical_envelope_; }
  double near_region_width() const { return near_width_; }
  /// All pairs are of the zero kind.
  bool is_free() const;
  /// N*N mask of pairs with a nonzero kind (only those can be singular).
  const std::vector<char>& singular_mask() const { return singular_mask_; }

  /// Pair term F_ij at separation r, mass factor included.
  double pair_value(int i, int j, double r, Branch branch = Branch::raw) const;
  double evaluate(const Vec& x, Branch branch = Branch::raw) const;
  /// Gradient under the mass scalar product: (1/m_i) dF/dx_i.
  Vec gradient(const Vec& x, Branch branch = Branch::raw) const;
  /// Plain partial derivatives dF/dx.
  Vec euclidean_gradient(const Vec& x, Branch branch = Branch::raw) const;
  /// Plain second partial derivatives; H must be sized (dN x dN) and is overwritten.
  void euclidean_hessian(const Vec& x, Branch branch, Eigen::MatrixXd& H) const;
  /// Value and Euclidean gradient in one pass.
  double value_and_gradient(const Vec& x, Branch branch, Vec& grad) const;

  /// Throws SingularEvaluationError if a non-zero pair is closer than the cutoff.
  void check_regular(const Vec& x) const;

 private:
  Radial pair_radial(int i, int j, double r, Branch branch) const;

  Layout layout_;
  std::vector<PairKind> kinds_;
  std::vector<char> singular_mask_;
  Envelope envelope_;
  bool canonical_envelope_ = true;
  double near_width_ = 2.0;
};

/// Canonical envelope dominating every pair term of `spec` for separations >= 2.
Envelope canonical_envelope(const PotentialSpec& spec);

}  // namespace hypermane

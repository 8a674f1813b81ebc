#pragma once

#include <memory>
#include <vector>

#include "curvlab/field.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

struct MetricError : FieldError {
    MetricError(const std::string& what, Complex witness) : FieldError(what), witnessPoint(witness) {}
    Complex witnessPoint;
};

struct NotHermitianError : MetricError {
    using MetricError::MetricError;
};

struct NotPositiveError : MetricError {
    NotPositiveError(const std::string& what, Complex witness, double eig)
        : MetricError(what, witness), eigenvalue(eig) {}
    double eigenvalue;
};

struct SurrogateError : FieldError {
    SurrogateError(const std::string& what, double resid) : FieldError(what), residual(resid) {}
    double residual;
};

// A positive definite hermitian metric h(v, w) = <P(s)v, w> on the trivial
// rank-n bundle over a grid domain. Construction goes through validate(),
// which rejects fields that are not hermitian or not positive at some node
// and records the spd margin (smallest eigenvalue seen anywhere). Instances
// are immutable; per-node eigendecompositions are cached at validation so the
// grid sweeps downstream reuse them.
class MetricField {
public:
    static MetricField validate(const MatrixPolyField& p, const GridDomain& domain,
                                double hermitianRelTol = 1e-12);

    int rank() const { return p_.rows(); }
    const GridDomain& domain() const { return domain_; }
    const MatrixPolyField& field() const { return p_; }
    double spdMargin() const { return spdMargin_; }

    Matrix value(Complex s) const { return p_.eval(s); }

    // <P(s)v, w> = adjoint(w) P(s) v. Conjugate-symmetric, linear in v.
    Complex inner(Complex s, const Vector& v, const Vector& w) const;
    double norm(Complex s, const Vector& v) const;

    // Connection coefficient A(s) = P(s)^{-1} dP/ds(s), by pointwise solve.
    Matrix connectionAt(Complex s) const;

    // Curvature operator R(d/ds, d/dsbar)(s) = -d/dsbar (P^{-1} dP/ds). For a
    // coefficient-table metric this expands to the pointwise-exact
    //   P^{-1} (dP/dsbar) P^{-1} (dP/ds) - P^{-1} (d2P/ds dsbar),
    // so no finite differences are involved. Self-adjoint wrt the metric:
    // P R = adjoint(R) P.
    Matrix curvatureAt(Complex s) const;

    // Degree-`degree` polynomial surrogate for A(s) = P^{-1} dP/ds about the
    // domain center (truncated Neumann series of the recentred inverse). The
    // result is certified against the pointwise solve on every grid node;
    // if the worst residual exceeds residTol the domain is too large for this
    // degree and SurrogateError is thrown.
    MatrixPolyField connectionForm(int degree = 10, double residTol = 1e-8) const;

    Matrix sqrtAt(Complex s) const;
    Matrix invSqrtAt(Complex s) const;

    // Grid-node accessors backed by the validation cache.
    const Matrix& nodeValue(int ix, int iy) const;
    Matrix nodeSqrt(int ix, int iy) const;
    Matrix nodeInvSqrt(int ix, int iy) const;

private:
    MetricField(MatrixPolyField p, GridDomain domain);

    struct NodeCache {
        Matrix value;
        Eigen::VectorXd eigs;
        Matrix vecs;
    };

    MatrixPolyField p_, dpS_, dpSBar_, dpMixed_;
    GridDomain domain_;
    double spdMargin_ = 0.0;
    std::shared_ptr<const std::vector<NodeCache>> cache_;
};

// A holomorphic section of the trivial rank-n bundle, given as an n x 1
// holomorphic coefficient-table field.
struct SectionField {
    explicit SectionField(MatrixPolyField field);
    Vector eval(Complex s) const { return f.eval(s).col(0); }
    MatrixPolyField f;
};

// Chern covariant derivative in the base direction at s:
// df/ds + A(s) f(s), with A the pointwise connection coefficient.
Vector covariantDerivative(const MetricField& m, const SectionField& phi, Complex s);

// Residual of the curvature identity for the second log-derivative of a
// section norm: with p2 = h(phi, phi),
//
//   d2/dsdsbar log p2 = -h(phi, R phi)/p2
//                       + (h(Dphi, Dphi) p2 - |h(Dphi, phi)|^2) / p2^2
//
// The left side is a finite-difference estimate, the right side is exact,
// so the residual cross-certifies the curvature sign convention against an
// independent stencil. Requires p2(s) > 0.
double logNormIdentityResidual(const MetricField& m, const SectionField& phi, Complex s,
                               double fdStep);

// The holomorphic section through w at s0 whose covariant derivative
// vanishes at s0: f(s) = w + (s0 - s) A(s0) w.
SectionField stationarySection(const MetricField& m, Complex s0, const Vector& w);

}  // namespace curvlab

#include "curvlab/metric.hpp"

#include <cmath>

#include "curvlab/finite_diff.hpp"

namespace curvlab {

namespace {

std::string pointStr(Complex s) {
    return "(" + std::to_string(s.real()) + ", " + std::to_string(s.imag()) + ")";
}

}  // namespace

MetricField::MetricField(MatrixPolyField p, GridDomain domain)
    : p_(std::move(p)),
      dpS_(p_.derivative(Deriv::S)),
      dpSBar_(p_.derivative(Deriv::SBar)),
      dpMixed_(p_.derivative(Deriv::S).derivative(Deriv::SBar)),
      domain_(domain) {}

MetricField MetricField::validate(const MatrixPolyField& p, const GridDomain& domain,
                                  double hermitianRelTol) {
    if (!p.isSquare()) throw FieldError("metric field must be square");

    if (!p.hasHermitianSymmetricTable(hermitianRelTol)) {
        // Locate a node where the asymmetry is visible to report a witness.
        Complex worstAt = domain.center();
        double worst = -1.0;
        for (int iy = 0; iy < domain.resolution(); ++iy) {
            for (int ix = 0; ix < domain.resolution(); ++ix) {
                const Complex s = domain.node(ix, iy);
                const Matrix v = p.eval(s);
                const double dev = (v - v.adjoint()).norm() / std::max(1.0, v.norm());
                if (dev > worst) {
                    worst = dev;
                    worstAt = s;
                }
            }
        }
        throw NotHermitianError("metric field is not hermitian (worst relative asymmetry " +
                                    std::to_string(worst) + " at " + pointStr(worstAt) + ")",
                                worstAt);
    }

    MetricField m(p, domain);

    const int res = domain.resolution();
    auto cache = std::make_shared<std::vector<NodeCache>>();
    cache->reserve(static_cast<std::size_t>(domain.nodeCount()));
    double margin = std::numeric_limits<double>::infinity();
    Complex marginAt = domain.center();

    for (int iy = 0; iy < res; ++iy) {
        for (int ix = 0; ix < res; ++ix) {
            const Complex s = domain.node(ix, iy);
            Matrix v = p.eval(s);
            const double asym = (v - v.adjoint()).norm() / std::max(1.0, v.norm());
            if (asym > hermitianRelTol)
                throw NotHermitianError("metric value is not hermitian at " + pointStr(s), s);
            v = 0.5 * (v + v.adjoint());  // strip roundoff asymmetry before factorizing
            Eigen::SelfAdjointEigenSolver<Matrix> es(v);
            const double lo = es.eigenvalues().minCoeff();
            if (lo < margin) {
                margin = lo;
                marginAt = s;
            }
            cache->push_back(NodeCache{std::move(v), es.eigenvalues(), es.eigenvectors()});
        }
    }

    if (!(margin > 0.0))
        throw NotPositiveError("metric is not positive definite at " + pointStr(marginAt) +
                                   " (smallest eigenvalue " + std::to_string(margin) + ")",
                               marginAt, margin);

    m.spdMargin_ = margin;
    m.cache_ = std::move(cache);
    return m;
}

Complex MetricField::inner(Complex s, const Vector& v, const Vector& w) const {
    return (w.adjoint() * (p_.eval(s) * v))(0, 0);
}

double MetricField::norm(Complex s, const Vector& v) const {
    const double n2 = inner(s, v, v).real();
    return std::sqrt(std::max(0.0, n2));
}

Matrix MetricField::connectionAt(Complex s) const {
    return p_.eval(s).partialPivLu().solve(dpS_.eval(s));
}

Matrix MetricField::curvatureAt(Complex s) const {
    const auto lu = p_.eval(s).partialPivLu();
    const Matrix a = lu.solve(dpSBar_.eval(s));
    const Matrix b = lu.solve(dpS_.eval(s));
    return a * b - lu.solve(dpMixed_.eval(s));
}

MatrixPolyField MetricField::connectionForm(int degree, double residTol) const {
    if (degree < 0) throw FieldError("connection surrogate degree must be >= 0");
    const Complex c = domain_.center();

    // Recenter, invert as a truncated power series, multiply by dP/ds.
    const MatrixPolyField q = p_.shiftedBy(c);
    const Matrix p0 = q.coeff(0, 0);
    const auto lu = p0.partialPivLu();

    MatrixPolyField n(rank(), rank());  // P0^{-1}(Q - P0), zero constant term
    for (const auto& [b, m] : q.coeffs()) {
        if (b.j == 0 && b.k == 0) continue;
        n.setCoeff(b.j, b.k, lu.solve(m));
    }

    MatrixPolyField inv = MatrixPolyField::identity(rank());  // sum (-N)^m, truncated
    MatrixPolyField power = inv;
    for (int m = 1; m <= degree; ++m) {
        power = power.mulTruncated(n, degree) * Complex(-1.0, 0.0);
        if (power.empty()) break;
        inv = inv + power;
    }

    const Matrix p0Inv = lu.solve(Matrix::Identity(rank(), rank()));
    MatrixPolyField invP0(rank(), rank());
    for (const auto& [b, m] : inv.coeffs()) invP0.setCoeff(b.j, b.k, Matrix(m * p0Inv));

    const MatrixPolyField theta = invP0.mulTruncated(q.derivative(Deriv::S), degree).shiftedBy(-c);

    // Certify against the pointwise solve on every grid node.
    double worst = 0.0;
    for (int iy = 0; iy < domain_.resolution(); ++iy) {
        for (int ix = 0; ix < domain_.resolution(); ++ix) {
            const Complex s = domain_.node(ix, iy);
            const double r = (theta.eval(s) - connectionAt(s)).norm();
            worst = std::max(worst, r);
        }
    }
    if (worst > residTol)
        throw SurrogateError("connection surrogate residual " + std::to_string(worst) +
                                 " exceeds tolerance (domain too large for degree " +
                                 std::to_string(degree) + ")",
                             worst);
    return theta;
}

Matrix MetricField::sqrtAt(Complex s) const {
    Matrix v = p_.eval(s);
    v = 0.5 * (v + v.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(v);
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

Matrix MetricField::invSqrtAt(Complex s) const {
    Matrix v = p_.eval(s);
    v = 0.5 * (v + v.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(v);
    return es.eigenvectors() * es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().adjoint();
}

const Matrix& MetricField::nodeValue(int ix, int iy) const {
    return (*cache_)[domain_.index(ix, iy)].value;
}

Matrix MetricField::nodeSqrt(int ix, int iy) const {
    const auto& nc = (*cache_)[domain_.index(ix, iy)];
    return nc.vecs * nc.eigs.cwiseSqrt().asDiagonal() * nc.vecs.adjoint();
}

Matrix MetricField::nodeInvSqrt(int ix, int iy) const {
    const auto& nc = (*cache_)[domain_.index(ix, iy)];
    return nc.vecs * nc.eigs.cwiseSqrt().cwiseInverse().asDiagonal() * nc.vecs.adjoint();
}

SectionField::SectionField(MatrixPolyField field) : f(std::move(field)) {
    if (!f.isColumn()) throw FieldError("section must be a column field");
    if (!f.isHolomorphic()) throw FieldError("section must be holomorphic");
}

Vector covariantDerivative(const MetricField& m, const SectionField& phi, Complex s) {
    if (phi.f.rows() != m.rank()) throw FieldError("section rank does not match metric rank");
    return phi.f.derivative(Deriv::S).eval(s) + m.connectionAt(s) * phi.f.eval(s);
}

double logNormIdentityResidual(const MetricField& m, const SectionField& phi, Complex s,
                               double fdStep) {
    const Vector f = phi.f.eval(s);
    const double p2 = m.inner(s, f, f).real();
    if (!(p2 > 0.0)) throw FieldError("section norm vanishes at the evaluation point");

    const Matrix r = m.curvatureAt(s);
    const Vector df = covariantDerivative(m, phi, s);
    const double curvTerm = -m.inner(s, Vector(r * f), f).real() / p2;
    const double gradTerm =
        (m.inner(s, df, df).real() * p2 - std::norm(m.inner(s, df, f))) / (p2 * p2);

    auto logNorm = [&](Complex z) {
        const Vector fz = phi.f.eval(z);
        return std::log(m.inner(z, fz, fz).real());
    };
    const double lhs = fdDerivativeReal(logNorm, s, FdWhich::MixedSSBar, fdStep);
    return std::abs(lhs - (curvTerm + gradTerm));
}

SectionField stationarySection(const MetricField& m, Complex s0, const Vector& w) {
    if (w.size() != m.rank()) throw FieldError("vector rank does not match metric rank");
    const Vector aw = m.connectionAt(s0) * w;
    MatrixPolyField f(m.rank(), 1);
    f.setCoeff(0, 0, Matrix(w + s0 * aw));
    f.setCoeff(1, 0, Matrix(-aw));
    return SectionField(std::move(f));
}

}  // namespace curvlab

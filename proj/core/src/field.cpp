#include "curvlab/field.hpp"

#include <algorithm>
#include <cmath>

namespace curvlab {

namespace {

std::string shapeStr(int r, int c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

// Exact for the degrees that occur here (binom(64,32) < 2^53).
double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return std::round(b);
}

std::vector<Complex> powers(Complex base, int maxExp) {
    std::vector<Complex> p(static_cast<std::size_t>(maxExp) + 1);
    p[0] = Complex(1.0, 0.0);
    for (int i = 1; i <= maxExp; ++i) p[i] = p[i - 1] * base;
    return p;
}

}  // namespace

MatrixPolyField::MatrixPolyField(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0)
        throw FieldError("field shape must be positive, got " + shapeStr(rows, cols));
}

MatrixPolyField MatrixPolyField::constant(const Matrix& value) {
    MatrixPolyField f(static_cast<int>(value.rows()), static_cast<int>(value.cols()));
    f.setCoeff(0, 0, value);
    return f;
}

MatrixPolyField MatrixPolyField::identity(int n) {
    return constant(Matrix::Identity(n, n));
}

MatrixPolyField MatrixPolyField::scalarMonomial(int j, int k, Complex c) {
    MatrixPolyField f(1, 1);
    Matrix m(1, 1);
    m(0, 0) = c;
    f.setCoeff(j, k, m);
    return f;
}

Matrix MatrixPolyField::coeff(int j, int k) const {
    auto it = coeffs_.find(Bidegree{j, k});
    if (it == coeffs_.end()) return Matrix::Zero(rows_, cols_);
    return it->second;
}

void MatrixPolyField::setCoeff(int j, int k, const Matrix& value) {
    if (j < 0 || k < 0) throw FieldError("negative bidegree");
    if (value.rows() != rows_ || value.cols() != cols_)
        throw FieldError("coefficient shape " + shapeStr(int(value.rows()), int(value.cols())) +
                         " does not match field shape " + shapeStr(rows_, cols_));
    if (value.isZero(0.0))
        coeffs_.erase(Bidegree{j, k});
    else
        coeffs_[Bidegree{j, k}] = value;
}

void MatrixPolyField::addCoeff(int j, int k, const Matrix& value) {
    setCoeff(j, k, coeff(j, k) + value);
}

int MatrixPolyField::maxTotalDegree() const {
    int d = 0;
    for (const auto& [b, c] : coeffs_) d = std::max(d, b.j + b.k);
    return d;
}

int MatrixPolyField::maxDegreeS() const {
    int d = 0;
    for (const auto& [b, c] : coeffs_) d = std::max(d, b.j);
    return d;
}

int MatrixPolyField::maxDegreeSBar() const {
    int d = 0;
    for (const auto& [b, c] : coeffs_) d = std::max(d, b.k);
    return d;
}

double MatrixPolyField::coeffScale() const {
    double m = 0.0;
    for (const auto& [b, c] : coeffs_) m = std::max(m, c.norm());
    return m;
}

bool MatrixPolyField::isHolomorphic(double tol) const {
    for (const auto& [b, c] : coeffs_)
        if (b.k > 0 && c.norm() > tol) return false;
    return true;
}

bool MatrixPolyField::hasHermitianSymmetricTable(double tol) const {
    if (rows_ != cols_) return false;
    const double scale = std::max(1.0, coeffScale());
    for (const auto& [b, c] : coeffs_) {
        if ((c - coeff(b.k, b.j).adjoint()).norm() > tol * scale) return false;
    }
    return true;
}

Matrix MatrixPolyField::eval(Complex s) const {
    if (!isFinitePoint(s)) throw FieldError("evaluation point is not finite");
    const auto pj = powers(s, maxDegreeS());
    const auto pk = powers(std::conj(s), maxDegreeSBar());
    Matrix acc = Matrix::Zero(rows_, cols_);
    for (const auto& [b, c] : coeffs_) acc += c * (pj[b.j] * pk[b.k]);
    return acc;
}

Complex MatrixPolyField::evalScalar(Complex s) const {
    if (rows_ != 1 || cols_ != 1) throw FieldError("evalScalar requires a 1x1 field");
    return eval(s)(0, 0);
}

MatrixPolyField MatrixPolyField::derivative(Deriv which) const {
    MatrixPolyField out(rows_, cols_);
    for (const auto& [b, c] : coeffs_) {
        if (which == Deriv::S && b.j > 0)
            out.addCoeff(b.j - 1, b.k, static_cast<double>(b.j) * c);
        else if (which == Deriv::SBar && b.k > 0)
            out.addCoeff(b.j, b.k - 1, static_cast<double>(b.k) * c);
    }
    return out;
}

MatrixPolyField MatrixPolyField::conjugateTranspose() const {
    MatrixPolyField out(cols_, rows_);
    for (const auto& [b, c] : coeffs_) out.addCoeff(b.k, b.j, c.adjoint());
    return out;
}

MatrixPolyField MatrixPolyField::truncated(int maxTotalDegree) const {
    MatrixPolyField out(rows_, cols_);
    for (const auto& [b, c] : coeffs_)
        if (b.j + b.k <= maxTotalDegree) out.setCoeff(b.j, b.k, c);
    return out;
}

MatrixPolyField MatrixPolyField::shiftedBy(Complex c) const {
    MatrixPolyField out(rows_, cols_);
    const auto pj = powers(c, maxDegreeS());
    const auto pk = powers(std::conj(c), maxDegreeSBar());
    for (const auto& [b, m] : coeffs_) {
        for (int i = 0; i <= b.j; ++i) {
            const double bj = binom(b.j, i);
            for (int l = 0; l <= b.k; ++l) {
                const double bk = binom(b.k, l);
                out.addCoeff(i, l, m * (bj * bk * pj[b.j - i] * pk[b.k - l]));
            }
        }
    }
    return out;
}

MatrixPolyField MatrixPolyField::pruned(double tol) const {
    MatrixPolyField out(rows_, cols_);
    for (const auto& [b, c] : coeffs_)
        if (c.norm() > tol) out.setCoeff(b.j, b.k, c);
    return out;
}

void MatrixPolyField::checkShapeMatch(const MatrixPolyField& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw FieldError(std::string(op) + ": shape mismatch " + shapeStr(rows_, cols_) +
                         " vs " + shapeStr(o.rows_, o.cols_));
}

MatrixPolyField MatrixPolyField::operator+(const MatrixPolyField& o) const {
    checkShapeMatch(o, "add");
    MatrixPolyField out = *this;
    for (const auto& [b, c] : o.coeffs_) out.addCoeff(b.j, b.k, c);
    return out;
}

MatrixPolyField MatrixPolyField::operator-(const MatrixPolyField& o) const {
    checkShapeMatch(o, "subtract");
    MatrixPolyField out = *this;
    for (const auto& [b, c] : o.coeffs_) out.addCoeff(b.j, b.k, -c);
    return out;
}

MatrixPolyField MatrixPolyField::operator*(const MatrixPolyField& o) const {
    return mulTruncated(o, maxTotalDegree() + o.maxTotalDegree());
}

MatrixPolyField MatrixPolyField::mulTruncated(const MatrixPolyField& o, int maxTotalDegree) const {
    if (cols_ != o.rows_)
        throw FieldError("multiply: inner dimensions " + shapeStr(rows_, cols_) + " * " +
                         shapeStr(o.rows_, o.cols_));
    MatrixPolyField out(rows_, o.cols_);
    for (const auto& [ba, ca] : coeffs_) {
        for (const auto& [bb, cb] : o.coeffs_) {
            const int j = ba.j + bb.j;
            const int k = ba.k + bb.k;
            if (j + k > maxTotalDegree) continue;
            out.addCoeff(j, k, ca * cb);
        }
    }
    return out;
}

MatrixPolyField MatrixPolyField::operator*(Complex c) const {
    MatrixPolyField out(rows_, cols_);
    for (const auto& [b, m] : coeffs_) out.setCoeff(b.j, b.k, c * m);
    return out;
}

MatrixPolyField expSurrogate(const MatrixPolyField& f, int order) {
    if (f.rows() != 1 || f.cols() != 1) throw FieldError("expSurrogate requires a 1x1 field");
    if (order < 0) throw FieldError("expSurrogate order must be >= 0");
    MatrixPolyField acc = MatrixPolyField::scalarMonomial(0, 0, 1.0);
    MatrixPolyField term = acc;
    for (int m = 1; m <= order; ++m) {
        term = term * f;
        term = term * Complex(1.0 / m, 0.0);
        acc = acc + term;
    }
    return acc;
}

bool Rect::contains(Complex s, double margin) const {
    return std::abs(s.real() - center.real()) <= halfWidthRe - margin &&
           std::abs(s.imag() - center.imag()) <= halfWidthIm - margin;
}

double Rect::distanceToBoundary(Complex s) const {
    const double dRe = halfWidthRe - std::abs(s.real() - center.real());
    const double dIm = halfWidthIm - std::abs(s.imag() - center.imag());
    return std::min(dRe, dIm);
}

GridDomain::GridDomain(Complex center, double halfWidthRe, double halfWidthIm, int resolution)
    : rect_{center, halfWidthRe, halfWidthIm}, resolution_(resolution) {
    if (!isFinitePoint(center)) throw FieldError("grid center is not finite");
    if (!(halfWidthRe > 0.0) || !(halfWidthIm > 0.0) ||
        !std::isfinite(halfWidthRe) || !std::isfinite(halfWidthIm))
        throw FieldError("grid half-widths must be positive and finite");
    if (resolution_ < 3) throw FieldError("grid resolution must be >= 3");
    if (resolution_ % 2 == 0) ++resolution_;  // center must be a node
}

Complex GridDomain::node(int ix, int iy) const {
    return Complex(rect_.center.real() - rect_.halfWidthRe + ix * spacingRe(),
                   rect_.center.imag() - rect_.halfWidthIm + iy * spacingIm());
}

std::size_t GridDomain::index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * resolution_ + ix;
}

bool GridDomain::sameLayout(const GridDomain& o) const {
    return rect_.center == o.rect_.center && rect_.halfWidthRe == o.rect_.halfWidthRe &&
           rect_.halfWidthIm == o.rect_.halfWidthIm && resolution_ == o.resolution_;
}

ScalarSampleField::ScalarSampleField(const GridDomain& domain)
    : domain_(domain),
      values_(static_cast<std::size_t>(domain.nodeCount()), 0.0),
      mask_(static_cast<std::size_t>(domain.nodeCount()), 1) {}

ScalarSampleField ScalarSampleField::sample(const GridDomain& domain,
                                            const std::function<double(Complex)>& u) {
    ScalarSampleField f(domain);
    for (int iy = 0; iy < domain.resolution(); ++iy) {
        for (int ix = 0; ix < domain.resolution(); ++ix) {
            const double v = u(domain.node(ix, iy));
            if (std::isfinite(v))
                f.set(ix, iy, v);
            else
                f.setMasked(ix, iy);
        }
    }
    return f;
}

void ScalarSampleField::set(int ix, int iy, double v) {
    if (!std::isfinite(v)) {
        setMasked(ix, iy);
        return;
    }
    const auto i = domain_.index(ix, iy);
    values_[i] = v;
    mask_[i] = 1;
}

void ScalarSampleField::setMasked(int ix, int iy) {
    const auto i = domain_.index(ix, iy);
    values_[i] = 0.0;
    mask_[i] = 0;
}

long ScalarSampleField::validCount() const {
    long n = 0;
    for (auto m : mask_) n += (m != 0);
    return n;
}

std::optional<double> ScalarSampleField::minValue() const {
    std::optional<double> best;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (mask_[i] && (!best || values_[i] < *best)) best = values_[i];
    return best;
}

std::optional<double> ScalarSampleField::maxValue() const {
    std::optional<double> best;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (mask_[i] && (!best || values_[i] > *best)) best = values_[i];
    return best;
}

std::optional<double> ScalarSampleField::interpolate(Complex s) const {
    if (!domain_.contains(s)) return std::nullopt;
    const int res = domain_.resolution();
    const double fx = (s.real() - (domain_.center().real() - domain_.halfWidthRe())) / domain_.spacingRe();
    const double fy = (s.imag() - (domain_.center().imag() - domain_.halfWidthIm())) / domain_.spacingIm();
    int ix = static_cast<int>(std::floor(fx));
    int iy = static_cast<int>(std::floor(fy));
    ix = std::clamp(ix, 0, res - 2);
    iy = std::clamp(iy, 0, res - 2);
    const double tx = std::clamp(fx - ix, 0.0, 1.0);
    const double ty = std::clamp(fy - iy, 0.0, 1.0);
    if (!valid(ix, iy) || !valid(ix + 1, iy) || !valid(ix, iy + 1) || !valid(ix + 1, iy + 1))
        return std::nullopt;
    const double v00 = value(ix, iy);
    const double v10 = value(ix + 1, iy);
    const double v01 = value(ix, iy + 1);
    const double v11 = value(ix + 1, iy + 1);
    return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
}

}  // namespace curvlab

#include <benchmark/benchmark.h>

#include "curvlab/field.hpp"
#include "curvlab/homomorphism.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/psh.hpp"
#include "curvlab/rng.hpp"

using namespace curvlab;

namespace {

MatrixPolyField gaussianWeight(double sign, int rank) {
    MatrixPolyField u(1, 1);
    u.setCoeff(1, 1, scalarMatrix(sign));
    const MatrixPolyField e = expSurrogate(u, 20);
    MatrixPolyField out(rank, rank);
    for (const auto& [deg, c] : e.coeffs())
        out.addCoeff(deg.j, deg.k, c(0, 0) * Matrix::Identity(rank, rank));
    return out;
}

MatrixPolyField randomSpd(int rank, std::uint64_t seed) {
    Prng rng(seed);
    MatrixPolyField g(rank, rank);
    for (int deg = 0; deg <= 1; ++deg) {
        Matrix c(rank, rank);
        for (int r = 0; r < rank; ++r)
            for (int col = 0; col < rank; ++col) c(r, col) = 0.35 * rng.complexNormal();
        g.setCoeff(deg, 0, c);
    }
    return g.conjugateTranspose() * g + MatrixPolyField::identity(rank) * Complex(0.6, 0.0);
}

void fieldEval(benchmark::State& state) {
    const MatrixPolyField p = gaussianWeight(1.0, static_cast<int>(state.range(0)));
    const Complex s(0.3, -0.4);
    for (auto _ : state) benchmark::DoNotOptimize(p.eval(s));
}
BENCHMARK(fieldEval)->Arg(1)->Arg(2)->Arg(4);

void curvatureSweep(benchmark::State& state) {
    const int rank = static_cast<int>(state.range(0));
    const GridDomain g(Complex(0.0, 0.0), 0.8, 0.8, 33);
    const MetricField m = MetricField::validate(randomSpd(rank, 42), g);
    for (auto _ : state) {
        Complex acc(0.0, 0.0);
        for (int iy = 0; iy < g.resolution(); ++iy)
            for (int ix = 0; ix < g.resolution(); ++ix)
                acc += m.curvatureAt(g.node(ix, iy)).trace();
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * g.nodeCount());
}
BENCHMARK(curvatureSweep)->Arg(1)->Arg(2)->Arg(4);

void normField(benchmark::State& state) {
    const int rank = static_cast<int>(state.range(0));
    const GridDomain g(Complex(0.0, 0.0), 0.8, 0.8, 33);
    const MetricField src = MetricField::validate(MatrixPolyField::identity(rank), g);
    const MetricField tgt = MetricField::validate(gaussianWeight(1.0, rank), g);
    const HomomorphismField h(MatrixPolyField::identity(rank), src, tgt);
    for (auto _ : state) benchmark::DoNotOptimize(logNormField(h));
    state.SetItemsProcessed(state.iterations() * g.nodeCount());
}
BENCHMARK(normField)->Arg(1)->Arg(2)->Arg(4);

void meanValueLadder(benchmark::State& state) {
    const GridDomain g(Complex(0.0, 0.0), 1.0, 1.0, static_cast<int>(state.range(0)));
    const ScalarSampleField u =
        ScalarSampleField::sample(g, [](Complex s) { return 0.5 * std::norm(s); });
    const RadiiPolicy policy = RadiiPolicy::forGrid(g);
    for (auto _ : state) benchmark::DoNotOptimize(pshVerdict(u, policy));
    state.SetItemsProcessed(state.iterations() * g.nodeCount());
}
BENCHMARK(meanValueLadder)->Arg(33)->Arg(65)->Arg(129);

void hypothesisNode(benchmark::State& state) {
    const int rank = static_cast<int>(state.range(0));
    const GridDomain g(Complex(0.0, 0.0), 0.8, 0.8, 9);
    const MetricField src = MetricField::validate(randomSpd(rank, 7), g);
    const MetricField tgt = MetricField::validate(randomSpd(rank, 8), g);
    const HomomorphismField h(MatrixPolyField::identity(rank), src, tgt);
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(hypothesisCheck(h, 16, seed++));
    state.SetItemsProcessed(state.iterations() * g.nodeCount());
}
BENCHMARK(hypothesisNode)->Arg(1)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();

#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "selfpump/joint_spectrum.hpp"
#include "selfpump/laser.hpp"
#include "selfpump/ring.hpp"
#include "selfpump/units.hpp"

using namespace selfpump;

namespace
{
constexpr int kTrials = 100;

// Sum of the multi-pass field series for the through port.
std::complex<double> through_series(const CouplingConfig &c, double phase)
{
    const double k1 = std::sqrt(1 - c.t1() * c.t1());
    const std::complex<double> trip = c.t2() * c.a() * std::polar(1.0, phase);
    std::complex<double> sum = c.t1();
    std::complex<double> term = -k1 * k1 * trip;
    for (int n = 0; n < 20000 && std::abs(term) > 1e-18; ++n) {
        sum += term;
        term *= c.t1() * trip;
    }
    return sum;
}
} // namespace

TEST(Properties, RingEnergyAndSeries)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t(0.3, 0.995), a(0.5, 1.0), ph(-M_PI, M_PI);
    for (int i = 0; i < kTrials; ++i) {
        const CouplingConfig c(t(rng), t(rng), a(rng));
        const double phase = ph(rng);
        const double th = through_transmission(c, phase);
        const double dr = drop_transmission(c, phase);
        EXPECT_GE(th, 0.0);
        EXPECT_GE(dr, 0.0);
        EXPECT_LE(th + dr, 1.0 + 1e-12);
        EXPECT_NEAR(std::abs(through_field(c, phase) - through_series(c, phase)), 0.0, 1e-8);
    }
}

TEST(Properties, LaserClosedFormMatchesIteration)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> loss(0.1, 4.0), psat(0.5, 10.0), ratio(1.1, 2.0);
    for (int i = 0; i < kTrials; ++i) {
        std::vector<LossElement> el;
        for (int k = 0; k < 5; ++k)
            el.push_back({"e" + std::to_string(k), loss(rng)});
        const LossBudget b(el, loss(rng), 2, 3, 0.01);
        const auto g = GainModel::calibrated(100.0, b.threshold_gain_db(), psat(rng));
        const double current = 100.0 * ratio(rng);
        const double closed = output_power_curve(g, b, current).drop_port_power_mw;
        const auto it = steady_state_roundtrip(g, b, current, 1e-3);
        ASSERT_TRUE(it.converged);
        EXPECT_NEAR(it.point.drop_port_power_mw / closed, 1.0, 1e-6);
        EXPECT_NEAR(threshold_current(g, b), 100.0, 1e-9);
    }
}

TEST(Properties, SchmidtInvariants)
{
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_int_distribution<int> dim(2, 24);
    for (int i = 0; i < kTrials; ++i) {
        Eigen::MatrixXcd m(dim(rng), dim(rng));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                m(r, c) = {n(rng), n(rng)};
        const auto s = schmidt(m);
        double sum = 0.0;
        for (double l : s.coefficients)
            sum += l;
        EXPECT_NEAR(sum, 1.0, 1e-12);
        EXPECT_GT(s.purity, 0.0);
        EXPECT_LE(s.purity, 1.0 + 1e-12);
        EXPECT_NEAR(s.purity * s.schmidt_number, 1.0, 1e-12);
        EXPECT_GE(s.purity, 1.0 / static_cast<double>(std::min(m.rows(), m.cols())) - 1e-12);
        for (std::size_t k = 1; k < s.singular_values.size(); ++k)
            EXPECT_LE(s.singular_values[k], s.singular_values[k - 1]);
        // global phase and scale leave the decomposition unchanged
        const auto scaled = schmidt((m * std::polar(3.7, 0.9)).eval());
        EXPECT_NEAR(scaled.purity, s.purity, 1e-12);
    }
}

#include <gtest/gtest.h>

#include "ock/channel.hpp"
#include "ock/framing.hpp"
#include "ock/rng.hpp"
#include "ock/waveform.hpp"
#include "oracles.hpp"

using namespace ock;

namespace {

ComplexVector random_vector(Rng& rng, std::size_t n) {
    ComplexVector v(n);
    for (auto& x : v) x = rng.complex_gaussian(1.0);
    return v;
}

} // namespace

TEST(Channel, IdentityPassesSignalThrough) {
    Rng rng(1);
    const auto x = random_vector(rng, 50);
    const auto y = apply_channel(x, ChannelModel{}, NoiseSpec{});
    ASSERT_EQ(y.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(y[i], x[i]);
}

TEST(Channel, ImpulseReadsBackTaps) {
    const ChannelModel ch{{{0.9, 0.1}, {0.0, -0.3}, {0.2, 0.2}, {-0.05, 0.0}}};
    const ComplexVector impulse{1.0};
    const auto y = apply_channel(impulse, ch, NoiseSpec{});
    ASSERT_EQ(y.size(), 4U);
    for (std::size_t p = 0; p < 4; ++p) EXPECT_EQ(y[p], ch.taps[p]);
}

TEST(Channel, MatchesNaiveConvolution) {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_vector(rng, 40 + trial);
        ChannelModel ch{random_vector(rng, 1 + trial % 6)};
        const auto y = apply_channel(x, ch, NoiseSpec{});
        const auto ref = oracle::convolve(x, ch.taps);
        ASSERT_EQ(y.size(), ref.size());
        for (std::size_t i = 0; i < y.size(); ++i) EXPECT_LE(std::abs(y[i] - ref[i]), 1e-12);
    }
}

TEST(Channel, IsLinearWithoutNoise) {
    Rng rng(11);
    const ChannelModel ch{random_vector(rng, 4)};
    const auto x = random_vector(rng, 64);
    const auto y = random_vector(rng, 64);
    const Complex a{0.7, -1.2}, b{-0.4, 0.3};
    ComplexVector mix(64);
    for (std::size_t i = 0; i < 64; ++i) mix[i] = a * x[i] + b * y[i];
    const auto lhs = apply_channel(mix, ch, NoiseSpec{});
    const auto cx = apply_channel(x, ch, NoiseSpec{});
    const auto cy = apply_channel(y, ch, NoiseSpec{});
    for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_LE(std::abs(lhs[i] - (a * cx[i] + b * cy[i])), 1e-12);
}

TEST(Channel, NoiseVarianceIsCalibrated) {
    const std::size_t n = 1'000'000;
    const double n0 = 0.37;
    const ComplexVector zeros(n, Complex{});
    const auto y = apply_channel(zeros, ChannelModel{}, NoiseSpec{n0, 99});
    double re2 = 0.0, im2 = 0.0, re = 0.0, im = 0.0;
    for (const auto& s : y) {
        re += s.real();
        im += s.imag();
        re2 += s.real() * s.real();
        im2 += s.imag() * s.imag();
    }
    const double N = static_cast<double>(n);
    const double var_re = re2 / N - (re / N) * (re / N);
    const double var_im = im2 / N - (im / N) * (im / N);
    EXPECT_NEAR(var_re + var_im, n0, 0.01 * n0);
    EXPECT_NEAR(var_re, n0 / 2, 0.015 * n0 / 2);
    EXPECT_NEAR(var_im, n0 / 2, 0.015 * n0 / 2);
}

TEST(Channel, NoiseIsDeterministicPerSeed) {
    const ComplexVector x(100, Complex{1.0, 0.0});
    const auto a = apply_channel(x, ChannelModel{}, NoiseSpec{1.0, 5});
    const auto b = apply_channel(x, ChannelModel{}, NoiseSpec{1.0, 5});
    const auto c = apply_channel(x, ChannelModel{}, NoiseSpec{1.0, 6});
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Channel, RejectsBadInput) {
    EXPECT_THROW(apply_channel(ComplexVector{}, ChannelModel{}, NoiseSpec{}), ConfigError);
    const ChannelModel no_first{{Complex{}, Complex{1.0, 0.0}}};
    EXPECT_THROW(apply_channel(ComplexVector{1.0}, no_first, NoiseSpec{}), ConfigError);
}

TEST(ConvolutionMatrix, SinglePathIsScaledIdentity) {
    const Complex h0{0.5, -0.5};
    const auto H = build_H(ChannelModel{{h0}}, 5);
    ASSERT_EQ(H.rows(), 5);
    ASSERT_EQ(H.cols(), 5);
    EXPECT_LE((H - h0 * Eigen::MatrixXcd::Identity(5, 5)).norm(), 0.0);
}

TEST(ConvolutionMatrix, TwoTapStructure) {
    const Complex a{1.0, 2.0}, b{-3.0, 0.5};
    const auto H = build_H(ChannelModel{{a, b}}, 3);
    ASSERT_EQ(H.rows(), 4);
    ASSERT_EQ(H.cols(), 3);
    Eigen::MatrixXcd expected(4, 3);
    expected << a, 0, 0,
                b, a, 0,
                0, b, a,
                0, 0, b;
    EXPECT_EQ(H, expected);
}

TEST(ConvolutionMatrix, AgreesWithApplyChannel) {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const ChannelModel ch{random_vector(rng, 4)};
        const auto x = random_vector(rng, 33);
        const Eigen::Map<const Eigen::VectorXcd> xv(x.data(), 33);
        const Eigen::VectorXcd hx = build_H(ch, 33) * xv;
        const auto y = apply_channel(x, ch, NoiseSpec{});
        ASSERT_EQ(static_cast<std::size_t>(hx.size()), y.size());
        for (std::size_t i = 0; i < y.size(); ++i) EXPECT_LE(std::abs(hx(static_cast<Eigen::Index>(i)) - y[i]), 1e-12);
    }
}

// A framed single symbol between guards: the symbol's received window must be
// exactly H psi (scaled by sqrt(E)), the block model of a received symbol.
TEST(ConvolutionMatrix, BlockModelMatchesFramedSymbol) {
    const ChirpBank bank(default_profile(4));
    const auto params = bank.params();
    auto layout = make_layout(params, 16, 1, 1e-3, 1, 2.5);
    const Bits bits{1, 0};
    const auto pkt = modulate(bits, bank, layout);
    ComplexVector padded = pkt.baseband;
    padded.resize(padded.size() + 20, Complex{});  // trailing guard

    const ChannelModel ch{{{0.8, 0.2}, {0.3, -0.1}, {0.0, 0.25}, {0.1, 0.1}}};
    const auto rx = apply_channel(padded, ch, NoiseSpec{});
    const std::size_t L = bank.samples_per_symbol();
    const std::size_t start = layout.header_samples();

    const auto psi = bank.waveform(pkt.symbol_indices[0]);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(L));
    for (std::size_t n = 0; n < L; ++n) v(static_cast<Eigen::Index>(n)) = std::sqrt(2.5) * psi[n];
    const Eigen::VectorXcd model = build_H(ch, L) * v;
    for (std::size_t i = 0; i < L + 3; ++i) EXPECT_LE(std::abs(rx[start + i] - model(static_cast<Eigen::Index>(i))), 1e-12);
}

TEST(RandomChannel, FixedProfileReturnsTaps) {
    const auto ch = sample_random_channel(ChannelProfile::fixed({Complex{1.0, 0.0}}), 3);
    ASSERT_EQ(ch.paths(), 1U);
    EXPECT_EQ(ch.taps[0], Complex(1.0, 0.0));
}

TEST(RandomChannel, ExpRayleighHasUnitEnergy) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto ch = sample_random_channel(4, "exp-rayleigh", seed);
        ASSERT_EQ(ch.paths(), 4U);
        EXPECT_NEAR(ch.energy(), 1.0, 1e-12);
    }
}

TEST(RandomChannel, ExpRayleighPowerDecays) {
    std::vector<double> power(4, 0.0);
    const int draws = 20000;
    Rng seeds(1);
    for (int i = 0; i < draws; ++i) {
        const auto ch = sample_random_channel(ChannelProfile::exp_rayleigh(4, 1.0), seeds.next_u64());
        for (std::size_t p = 0; p < 4; ++p) power[p] += std::norm(ch.taps[p]) / draws;
    }
    for (std::size_t p = 0; p + 1 < 4; ++p) EXPECT_GT(power[p], power[p + 1]);
}

TEST(RandomChannel, SameSeedSameTaps) {
    const auto a = sample_random_channel(4, "exp-rayleigh", 42);
    const auto b = sample_random_channel(4, "exp-rayleigh", 42);
    EXPECT_EQ(a.taps, b.taps);
}

TEST(RandomChannel, UnknownProfileIsRejected) {
    EXPECT_THROW(sample_random_channel(4, "rician", 1), ConfigError);
    EXPECT_THROW(parse_channel_kind("bogus"), ConfigError);
}

TEST(RandomChannel, TapTextRoundTrip) {
    const auto taps = parse_taps("1,0; 0.5,-0.25 ;0,0.125");
    ASSERT_EQ(taps.size(), 3U);
    EXPECT_EQ(taps[1], Complex(0.5, -0.25));
    EXPECT_EQ(parse_taps(format_taps(taps)), taps);
    EXPECT_THROW(parse_taps("1;2"), ConfigError);
}

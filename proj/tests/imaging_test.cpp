#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "restobench/imaging.hpp"
#include "restobench/metrics.hpp"
#include "test_util.hpp"

using namespace restobench;
using testutil::make_noise_image;
using testutil::make_test_image;
using testutil::max_abs_diff;

// --- resize ---

TEST_CASE("resize with identity dimensions returns the input bit-exactly", "[resize]") {
    const auto img = make_test_image(1, 23, 17);
    const auto out = resize(img, 23, 17);
    CHECK(out.bit_equal(img));
}

TEST_CASE("resize preserves constant images", "[resize]") {
    ImageBuffer img(16, 12, 0.5);
    for (const auto& [w, h] : std::vector<std::pair<int, int>>{{8, 6}, {16, 12}, {33, 25}, {5, 19}}) {
        const auto out = resize(img, w, h);
        for (double v : out.data) REQUIRE(v == Catch::Approx(0.5).margin(1e-12));
    }
}

TEST_CASE("resize matches a direct bicubic reference", "[resize]") {
    // 8x8 gradient down to 4x4 and back, plus assorted shapes and contents.
    ImageBuffer grad(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            for (int c = 0; c < 3; ++c) grad.at(y, x, c) = (x + 8.0 * y) / 63.0;

    const auto down = resize(grad, 4, 4);
    CHECK(max_abs_diff(down, testutil::ref_bicubic_resize(grad, 4, 4)) <= 1e-6);
    const auto up = resize(down, 8, 8);
    CHECK(max_abs_diff(up, testutil::ref_bicubic_resize(down, 8, 8)) <= 1e-6);

    const auto a = make_test_image(2, 17, 9);
    CHECK(max_abs_diff(resize(a, 23, 31), testutil::ref_bicubic_resize(a, 23, 31)) <= 1e-6);
    const auto b = make_noise_image(3, 32, 20);
    CHECK(max_abs_diff(resize(b, 16, 10), testutil::ref_bicubic_resize(b, 16, 10)) <= 1e-6);
    CHECK(max_abs_diff(resize(b, 64, 40), testutil::ref_bicubic_resize(b, 64, 40)) <= 1e-6);
    const auto c = make_test_image(4, 5, 4);
    CHECK(max_abs_diff(resize(c, 1, 1), testutil::ref_bicubic_resize(c, 1, 1)) <= 1e-6);
    CHECK(max_abs_diff(resize(c, 160, 2), testutil::ref_bicubic_resize(c, 160, 2)) <= 1e-6);
}

TEST_CASE("resize rejects non-positive target dimensions", "[resize]") {
    const auto img = make_test_image(5, 8, 8);
    CHECK_THROWS_AS(resize(img, 0, 8), Error);
    CHECK_THROWS_AS(resize(img, 8, -1), Error);
}

// --- convolve2d ---

TEST_CASE("convolving with the identity kernel returns the input bit-exactly", "[convolve]") {
    const auto img = make_test_image(6, 19, 13);
    CHECK(convolve2d(img, Kernel2D{}, Boundary::Clamp).bit_equal(img));
    CHECK(convolve2d(img, Kernel2D{}, Boundary::Periodic).bit_equal(img));
}

TEST_CASE("convolution with a normalized kernel preserves constants", "[convolve]") {
    ImageBuffer img(14, 10, 0.37);
    const auto kernel = motion_kernel(7, 63.0);
    for (Boundary b : {Boundary::Clamp, Boundary::Periodic}) {
        const auto out = convolve2d(img, kernel, b);
        for (double v : out.data) REQUIRE(v == Catch::Approx(0.37).margin(1e-12));
    }
}

TEST_CASE("convolution matches the brute-force reference", "[convolve]") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto random_kernel = [&](int size) {
        Kernel2D k;
        k.size = size;
        k.weights.resize(static_cast<size_t>(size) * size);
        double sum = 0.0;
        for (double& w : k.weights) {
            w = unit(gen);
            sum += w;
        }
        for (double& w : k.weights) w /= sum;
        return k;
    };

    const auto img = make_noise_image(7, 16, 16);
    for (int size : {3, 5, 9}) {
        const auto k = random_kernel(size);
        for (Boundary b : {Boundary::Clamp, Boundary::Periodic}) {
            const auto got = convolve2d(img, k, b);
            const auto want = testutil::ref_convolve(img, k, b == Boundary::Periodic);
            REQUIRE(max_abs_diff(got, want) <= 1e-9);
        }
    }

    // Kernel larger than the image exercises the out-of-range tap paths.
    const auto small = make_noise_image(8, 5, 7);
    const auto big = random_kernel(9);
    for (Boundary b : {Boundary::Clamp, Boundary::Periodic}) {
        const auto got = convolve2d(small, big, b);
        const auto want = testutil::ref_convolve(small, big, b == Boundary::Periodic);
        REQUIRE(max_abs_diff(got, want) <= 1e-9);
    }
}

TEST_CASE("convolution rejects unnormalized kernels", "[convolve]") {
    Kernel2D k;
    k.size = 3;
    k.weights.assign(9, 0.5); // sums to 4.5
    CHECK_THROWS_AS(convolve2d(make_test_image(9, 8, 8), k, Boundary::Clamp), Error);
}

// --- gaussian_blur ---

TEST_CASE("gaussian blur with sigma 0 is the identity", "[blur]") {
    const auto img = make_test_image(10, 21, 15);
    CHECK(gaussian_blur(img, 0.0).bit_equal(img));
}

TEST_CASE("gaussian blur rejects negative sigma", "[blur]") {
    CHECK_THROWS_AS(gaussian_blur(make_test_image(11, 8, 8), -0.5), Error);
}

TEST_CASE("gaussian blur preserves constants", "[blur]") {
    ImageBuffer img(13, 9, 0.62);
    const auto out = gaussian_blur(img, 2.0);
    for (double v : out.data) REQUIRE(v == Catch::Approx(0.62).margin(1e-12));
}

TEST_CASE("gaussian blur impulse response matches direct 2-D evaluation", "[blur]") {
    // The separable pass pair must reproduce the tensor-product Gaussian.
    const double sigma = 1.0;
    const int radius = 3; // ceil(3*sigma)
    auto w1 = detail::gaussian_weights(sigma, radius);

    auto check_impulse = [&](int h, int w, int iy, int ix) {
        ImageBuffer img(w, h, 0.0);
        for (int c = 0; c < 3; ++c) img.at(iy, ix, c) = 1.0;
        const auto out = gaussian_blur(img, sigma, Boundary::Periodic);
        ImageBuffer want(w, h, 0.0);
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx) {
                const int y = ((iy + dy) % h + h) % h;
                const int x = ((ix + dx) % w + w) % w;
                for (int c = 0; c < 3; ++c) want.at(y, x, c) = w1[dy + radius] * w1[dx + radius];
            }
        REQUIRE(max_abs_diff(out, want) <= 1e-9);
    };

    check_impulse(17, 17, 8, 8); // interior
    check_impulse(17, 17, 0, 0); // wraps around both edges
}

TEST_CASE("gaussian blur reduces variance", "[blur]") {
    const auto img = make_noise_image(12, 32, 32);
    const auto out = gaussian_blur(img, 1.5);
    auto variance = [](const ImageBuffer& im) {
        double m = 0.0;
        for (double v : im.data) m += v;
        m /= static_cast<double>(im.data.size());
        double s = 0.0;
        for (double v : im.data) s += (v - m) * (v - m);
        return s / static_cast<double>(im.data.size());
    };
    CHECK(variance(out) < variance(img));
}

// --- motion_kernel ---

TEST_CASE("motion kernel of length 1 is the 1x1 identity", "[motion]") {
    const auto k = motion_kernel(1, 137.0);
    REQUIRE(k.size == 1);
    CHECK(k.weights.size() == 1);
    CHECK(k.weights[0] == 1.0);
}

TEST_CASE("horizontal motion kernel of length 5 is a uniform center row", "[motion]") {
    const auto k = motion_kernel(5, 0.0);
    REQUIRE(k.size == 5);
    for (int dy = 0; dy < 5; ++dy)
        for (int dx = 0; dx < 5; ++dx) {
            if (dy == 2)
                REQUIRE(k.at(dy, dx) == 0.2);
            else
                REQUIRE(k.at(dy, dx) == 0.0);
        }
}

TEST_CASE("vertical motion kernel of length 4 has the expected dyadic column", "[motion]") {
    // A 4x1 rectangle through the center of a 5x5 grid covers the middle
    // column: half of the end cells, all of the middle three.
    const auto k = motion_kernel(4, 90.0);
    REQUIRE(k.size == 5);
    const double want[5] = {0.125, 0.25, 0.25, 0.25, 0.125};
    for (int dy = 0; dy < 5; ++dy)
        for (int dx = 0; dx < 5; ++dx) {
            if (dx == 2)
                REQUIRE(k.at(dy, dx) == want[dy]);
            else
                REQUIRE(k.at(dy, dx) == 0.0);
        }
}

TEST_CASE("motion kernels are normalized, nonnegative, and sized to the length", "[motion]") {
    std::mt19937_64 gen(4242);
    std::uniform_int_distribution<int> len(1, 200);
    std::uniform_real_distribution<double> ang(0.0, 360.0);
    for (int i = 0; i < 300; ++i) {
        const int L = len(gen);
        const double a = ang(gen);
        const auto k = motion_kernel(L, a);
        REQUIRE(k.size >= L);
        REQUIRE(k.size % 2 == 1);
        REQUIRE(k.size - 2 < L); // smallest odd side that fits the length
        double sum = 0.0;
        for (double w : k.weights) {
            REQUIRE(w >= 0.0);
            sum += w;
        }
        REQUIRE(sum == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("motion kernel direction is 180-degree symmetric", "[motion]") {
    std::mt19937_64 gen(515);
    std::uniform_int_distribution<int> len(1, 120);
    std::uniform_real_distribution<double> ang(0.0, 180.0);
    for (int i = 0; i < 100; ++i) {
        const int L = len(gen);
        const double a = ang(gen);
        const auto k1 = motion_kernel(L, a);
        const auto k2 = motion_kernel(L, a + 180.0);
        REQUIRE(k1.size == k2.size);
        REQUIRE(k1.weights == k2.weights);
    }
}

TEST_CASE("motion kernel rejects lengths below 1", "[motion]") {
    CHECK_THROWS_AS(motion_kernel(0, 10.0), Error);
}

// --- dct_artifact ---

TEST_CASE("dct artifact keeps uniform mid-gray unchanged", "[dct]") {
    ImageBuffer img(24, 16, 128.0 / 255.0);
    for (int q : {5, 50, 95}) {
        const auto out = dct_artifact(img, q);
        REQUIRE(out.bit_equal(img));
    }
}

TEST_CASE("stronger quantization yields larger reconstruction error", "[dct]") {
    const auto img = make_test_image(20, 32, 32);
    const double mse_low = mse(img, dct_artifact(img, 10));
    const double mse_high = mse(img, dct_artifact(img, 90));
    CHECK(mse_low > mse_high);
    CHECK(mse_high > 0.0);
}

TEST_CASE("quality 100 reconstruction stays within the rounding bound", "[dct]") {
    for (uint64_t seed : {uint64_t{21}, uint64_t{22}, uint64_t{23}}) {
        const auto img = make_test_image(seed, 40, 24);
        const auto out = dct_artifact(img, 100);
        REQUIRE(max_abs_diff(out, img) <= 8.0 / 255.0);
    }
}

TEST_CASE("dct artifact is deterministic", "[dct]") {
    const auto img = make_test_image(24, 33, 19); // non-multiple-of-8 dims
    CHECK(dct_artifact(img, 35).bit_equal(dct_artifact(img, 35)));
}

TEST_CASE("dct artifact rejects out-of-range quality", "[dct]") {
    const auto img = make_test_image(25, 8, 8);
    CHECK_THROWS_AS(dct_artifact(img, 0), Error);
    CHECK_THROWS_AS(dct_artifact(img, 101), Error);
}

// --- srgb transfer ---

TEST_CASE("srgb transfer endpoints are fixed in both directions", "[srgb]") {
    CHECK(srgb_to_linear(0.0) == 0.0);
    CHECK(srgb_to_linear(1.0) == 1.0);
    CHECK(srgb_to_display(0.0) == 0.0);
    CHECK(srgb_to_display(1.0) == 1.0);
}

TEST_CASE("srgb display value 0.5 maps to the closed-form linear value", "[srgb]") {
    // ((0.5 + 0.055) / 1.055)^2.4
    CHECK(srgb_to_linear(0.5) == Catch::Approx(0.21404114048223255).margin(1e-12));
}

TEST_CASE("srgb transfer round trip is tight", "[srgb]") {
    const auto img = make_test_image(30, 31, 21);
    const auto round = srgb_transfer(srgb_transfer(img, TransferDirection::ToLinear),
                                     TransferDirection::ToDisplay);
    CHECK(max_abs_diff(round, img) <= 1e-7);

    const auto round2 = srgb_transfer(srgb_transfer(img, TransferDirection::ToDisplay),
                                      TransferDirection::ToLinear);
    CHECK(max_abs_diff(round2, img) <= 1e-7);
}

TEST_CASE("srgb transfer clamps out-of-range inputs", "[srgb]") {
    ImageBuffer img(2, 1);
    img.data.assign(img.data.size(), 0.0);
    img.at(0, 0, 0) = -0.25;
    img.at(0, 1, 0) = 1.25;
    const auto lin = srgb_transfer(img, TransferDirection::ToLinear);
    CHECK(lin.at(0, 0, 0) == 0.0);
    CHECK(lin.at(0, 1, 0) == 1.0);
}

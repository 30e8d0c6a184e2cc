#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "epictrl/adam.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/loss.hpp"
#include "epictrl/network.hpp"
#include "epictrl/rng.hpp"
#include "epictrl/weights_io.hpp"

using namespace epictrl;

namespace {

NetworkSizes small_sizes(std::size_t hidden = 4)
{
    NetworkSizes s;
    s.hidden = hidden;
    s.dense_hidden = {6};
    return s;
}

Sequence random_input(const NetworkSizes& sz, std::size_t batch, std::uint64_t seed)
{
    Rng rng(seed);
    Sequence seq(sz.input_width, sz.seq_len, batch);
    for (Eigen::Index k = 0; k < seq.data.size(); ++k)
        seq.data.data()[k] = rng.uniform();
    return seq;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    Rng rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index k = 0; k < m.size(); ++k)
        m.data()[k] = rng.uniform(-1.0, 1.0);
    return m;
}

// Scalar objective whose gradient wrt the outputs is `up`.
double weighted_output(const NetworkParams& p, const Sequence& x, const Eigen::MatrixXd& up)
{
    return forward(p, x).cwiseProduct(up).sum();
}

// Swap the two direction halves of a weight matrix's input columns.
void swap_input_halves(RowMatrix& w, Eigen::Index half)
{
    RowMatrix left = w.leftCols(half);
    w.leftCols(half) = w.rightCols(half);
    w.rightCols(half) = left;
}

Sequence reverse_time(const Sequence& x)
{
    Sequence r(static_cast<std::size_t>(x.data.rows()), x.steps, x.batch);
    for (std::size_t t = 0; t < x.steps; ++t)
        r.step(t) = x.step(x.steps - 1 - t);
    return r;
}

Sequence single(const Sequence& x, std::size_t b)
{
    Sequence one(static_cast<std::size_t>(x.data.rows()), x.steps, 1);
    for (std::size_t t = 0; t < x.steps; ++t)
        one.step(t) = x.step(t).col(static_cast<Eigen::Index>(b));
    return one;
}

} // namespace

TEST_CASE("parameter count matches the closed form")
{
    NetworkSizes sz;
    sz.hidden = 8;
    // three layers, two directions: 4 gates x (in*H + H*H + H); dense 16->64->4
    const std::size_t layer0 = 2 * 4 * (7 * 8 + 8 * 8 + 8);
    const std::size_t deeper = 2 * 4 * (16 * 8 + 8 * 8 + 8);
    const std::size_t dense = 16 * 64 + 64 + 64 * 4 + 4;
    CHECK(sz.parameter_count() == layer0 + 2 * deeper + dense);
    CHECK(init_network(1, sz).parameter_count() == sz.parameter_count());
}

TEST_CASE("init is seeded and sets the forget bias")
{
    const auto sz = small_sizes();
    CHECK(init_network(5, sz) == init_network(5, sz));
    CHECK_FALSE(init_network(5, sz) == init_network(6, sz));

    const auto p = init_network(5, sz);
    const auto& b = p.recurrent[1].backward.b;
    for (Eigen::Index k = 0; k < b.size(); ++k)
        CHECK(b(k) == (k >= 4 && k < 8 ? 1.0 : 0.0));
}

TEST_CASE("incoherent sizes are rejected")
{
    NetworkSizes sz;
    sz.hidden = 0;
    CHECK_THROWS_AS(init_network(1, sz), SizeMismatch);
    sz = NetworkSizes{};
    sz.dense_hidden = {64, 0};
    CHECK_THROWS_AS(init_network(1, sz), SizeMismatch);
}

TEST_CASE("zero weights give zero outputs")
{
    const auto sz = small_sizes();
    const auto q = forward(NetworkParams::zeros(sz), random_input(sz, 3, 9));
    CHECK(q.rows() == 4);
    CHECK(q.cols() == 3);
    CHECK(q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("time reversal with mirrored weights leaves the output unchanged")
{
    const auto sz = small_sizes(5);
    const auto p = init_network(21, sz);
    const auto h = static_cast<Eigen::Index>(sz.hidden);

    NetworkParams mirrored = p;
    for (std::size_t l = 0; l < sz.recurrent_layers; ++l) {
        std::swap(mirrored.recurrent[l].forward, mirrored.recurrent[l].backward);
        if (l > 0) {
            swap_input_halves(mirrored.recurrent[l].forward.w, h);
            swap_input_halves(mirrored.recurrent[l].backward.w, h);
        }
    }
    swap_input_halves(mirrored.dense[0].w, h);

    const auto x = random_input(sz, 4, 22);
    const Eigen::MatrixXd a = forward(p, x);
    const Eigen::MatrixXd b = forward(mirrored, reverse_time(x));
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    // and reversal alone does change it
    CHECK((a - forward(p, reverse_time(x))).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("batch rows are independent")
{
    const auto sz = small_sizes();
    const auto p = init_network(3, sz);
    const auto x = random_input(sz, 3, 4);

    Sequence dup(sz.input_width, sz.seq_len, 2);
    for (std::size_t t = 0; t < sz.seq_len; ++t) {
        dup.step(t).col(0) = x.step(t).col(1);
        dup.step(t).col(1) = x.step(t).col(1);
    }
    const Eigen::MatrixXd q2 = forward(p, dup);
    CHECK(q2.col(0) == q2.col(1));

    Sequence perm(sz.input_width, sz.seq_len, 3);
    for (std::size_t t = 0; t < sz.seq_len; ++t)
        for (Eigen::Index b = 0; b < 3; ++b)
            perm.step(t).col(b) = x.step(t).col((b + 1) % 3);
    const Eigen::MatrixXd q = forward(p, x);
    const Eigen::MatrixXd qp = forward(p, perm);
    for (Eigen::Index b = 0; b < 3; ++b)
        CHECK((qp.col(b) - q.col((b + 1) % 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tensor entry points agree with the sequence layout")
{
    const auto sz = small_sizes();
    const auto p = init_network(8, sz);
    Tensor batch({2, sz.seq_len, sz.input_width});
    Rng rng(1);
    for (double& v : batch.data)
        v = rng.uniform();
    const Tensor q = forward(p, batch);
    REQUIRE(q.shape == std::vector<std::size_t>{2, 4});

    const Sequence seq = to_sequence(batch, sz);
    const Eigen::MatrixXd qm = forward(p, seq);
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t o = 0; o < 4; ++o)
            CHECK(q.at(b, o) == qm(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(b)));

    CHECK_THROWS_AS(forward(p, Tensor({2, 29, 7})), ShapeMismatch);
    CHECK_THROWS_AS(forward(p, Tensor({2, 30, 6})), ShapeMismatch);
    CHECK_THROWS_AS(backward(p, batch, Tensor({2, 3})), ShapeMismatch);
}

TEST_CASE("zero upstream gradient gives zero parameter gradients")
{
    const auto sz = small_sizes();
    const auto p = init_network(2, sz);
    ForwardCache cache;
    forward(p, random_input(sz, 2, 3), &cache);
    const auto g = backward(p, cache, Eigen::MatrixXd::Zero(4, 2));
    for (const auto& v : g.views())
        for (double x : v.values)
            CHECK(x == 0.0);
}

TEST_CASE("analytic gradients match central differences")
{
    const auto sz = small_sizes(4);
    auto p = init_network(11, sz);
    const auto x = random_input(sz, 2, 12);
    const Eigen::MatrixXd up = random_matrix(4, 2, 13);

    ForwardCache cache;
    forward(p, x, &cache);
    const auto g = backward(p, cache, up);

    auto pv = p.views();
    const auto gv = g.views();
    Rng pick(14);
    const double h = 1e-5;
    double worst = 0.0;
    for (int n = 0; n < 250; ++n) {
        const std::size_t k = pick.below(pv.size());
        const std::size_t j = pick.below(pv[k].values.size());
        double& w = pv[k].values[j];
        const double saved = w;
        w = saved + h;
        const double plus = weighted_output(p, x, up);
        w = saved - h;
        const double minus = weighted_output(p, x, up);
        w = saved;
        const double numeric = (plus - minus) / (2 * h);
        const double analytic = gv[k].values[j];
        const double rel = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        worst = std::max(worst, rel);
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("batch gradient is the sum of per-sample gradients")
{
    const auto sz = small_sizes();
    const auto p = init_network(31, sz);
    const auto x = random_input(sz, 2, 32);
    const Eigen::MatrixXd up = random_matrix(4, 2, 33);

    ForwardCache cache;
    forward(p, x, &cache);
    const auto both = backward(p, cache, up);

    NetworkParams sum = NetworkParams::zeros(sz);
    for (std::size_t b = 0; b < 2; ++b) {
        ForwardCache c1;
        forward(p, single(x, b), &c1);
        const auto gb = backward(p, c1, up.col(static_cast<Eigen::Index>(b)));
        auto sv = sum.views();
        const auto bv = gb.views();
        for (std::size_t k = 0; k < sv.size(); ++k)
            for (std::size_t j = 0; j < sv[k].values.size(); ++j)
                sv[k].values[j] += bv[k].values[j];
    }
    const auto a = both.views();
    const auto s = sum.views();
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t j = 0; j < a[k].values.size(); ++j)
            worst = std::max(worst, std::abs(a[k].values[j] - s[k].values[j]));
    CHECK(worst < 1e-12);
}

TEST_CASE("reused gradient buffers are overwritten, not accumulated")
{
    const auto sz = small_sizes();
    const auto p = init_network(41, sz);
    const auto x = random_input(sz, 3, 42);
    const Eigen::MatrixXd up = random_matrix(4, 3, 43);
    ForwardCache cache;
    forward(p, x, &cache);
    NetworkParams g;
    backward(p, cache, up, g);
    backward(p, cache, up, g);
    CHECK(g == backward(p, cache, up));
}

TEST_CASE("mse loss")
{
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> z{0.0, 0.0};
    const auto r = mse_loss(a, z);
    CHECK(r.loss == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(r.gradient == std::vector<double>{1.0, 2.0});
    CHECK(mse_loss(z, a).loss == r.loss);

    const auto same = mse_loss(a, a);
    CHECK(same.loss == 0.0);
    CHECK(same.gradient == std::vector<double>{0.0, 0.0});

    CHECK_THROWS_AS(mse_loss(a, std::vector<double>{1.0}), ShapeMismatch);
    CHECK_THROWS_AS(mse_loss(std::vector<double>{}, std::vector<double>{}), ShapeMismatch);
}

TEST_CASE("adam first step moves by about lr times the sign")
{
    const auto sz = small_sizes();
    auto p = init_network(51, sz);
    const auto before = p;
    auto g = NetworkParams::zeros(sz);
    auto gv = g.views();
    Rng rng(52);
    for (auto& v : gv)
        for (double& x : v.values)
            x = rng.uniform(-2.0, 2.0);

    auto state = AdamState::for_params(p);
    adam_update(p, g, state);
    CHECK(state.step == 1);

    const auto pv = p.views();
    const auto bv = before.views();
    for (std::size_t k = 0; k < pv.size(); ++k)
        for (std::size_t j = 0; j < pv[k].values.size(); ++j) {
            const double grad = gv[k].values[j];
            const double expected = -1e-3 * grad / (std::abs(grad) + 1e-8);
            CHECK(pv[k].values[j] - bv[k].values[j] == doctest::Approx(expected).epsilon(1e-9));
        }
}

TEST_CASE("adam with zero gradients keeps parameters and decays moments")
{
    const auto sz = small_sizes();
    auto p = init_network(61, sz);
    const auto before = p;
    auto state = AdamState::for_params(p);
    for (auto& v : state.m.views())
        std::fill(v.values.begin(), v.values.end(), 0.0);
    adam_update(p, NetworkParams::zeros(sz), state);
    CHECK(p == before);

    auto ones = NetworkParams::zeros(sz);
    for (auto& v : ones.views())
        std::fill(v.values.begin(), v.values.end(), 1.0);
    auto s2 = AdamState::for_params(p);
    adam_update(p, ones, s2);
    const auto moved = p;
    adam_update(p, NetworkParams::zeros(sz), s2);
    CHECK(s2.m.views()[0].values[0] == doctest::Approx(0.1 * 0.9));
    CHECK(s2.v.views()[0].values[0] == doctest::Approx(0.001 * 0.999));
    CHECK_FALSE(p == moved); // momentum keeps moving

    auto wrong = NetworkParams::zeros(small_sizes(5));
    CHECK_THROWS_AS(adam_update(p, wrong, s2), ShapeMismatch);
}

TEST_CASE("weight archive round trip and corruption")
{
    const auto dir = std::filesystem::temp_directory_path() / "epictrl_test_nn";
    std::filesystem::create_directories(dir);
    const auto path = dir / "w.bin";

    const auto p = init_network(71, NetworkSizes{});
    save_weights(p, path);
    CHECK(load_weights(path) == p);

    auto bytes = encode_weights(p);
    CHECK(decode_weights(bytes) == p);

    const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + bytes.size() / 2);
    CHECK_THROWS_AS(decode_weights(cut), FormatError);
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(cut.data()), static_cast<std::streamsize>(cut.size()));
    }
    CHECK_THROWS_AS(load_weights(path), FormatError);

    auto bumped = bytes;
    bumped[kWeightsMagic.size()] = 2; // version field, little-endian
    try {
        decode_weights(bumped);
        FAIL("version mismatch accepted");
    } catch (const FormatError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("found 2") != std::string::npos);
        CHECK(msg.find("expected 1") != std::string::npos);
    }

    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x01;
    CHECK_THROWS_AS(decode_weights(flipped), FormatError);

    CHECK_THROWS_AS(load_weights(dir / "missing.bin"), IoError);
    std::filesystem::remove_all(dir);
}

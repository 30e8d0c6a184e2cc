#include "epictrl/network.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "epictrl/errors.hpp"
#include "epictrl/rng.hpp"

namespace epictrl {

namespace {

using Eigen::MatrixXd;

template <typename Block>
void sigmoid_inplace(Block m)
{
    m = (1.0 + (-m.array()).exp()).inverse().matrix();
}

// tanh(x) = 2 sigmoid(2x) - 1; Eigen only vectorizes exp for doubles.
template <typename Dst, typename Src>
void tanh_into(Dst dst, const Src& src)
{
    dst = (2.0 * (1.0 + (-2.0 * src.array()).exp()).inverse() - 1.0).matrix();
}

LstmCellParams zero_cell(std::size_t in, std::size_t hidden)
{
    return {RowMatrix::Zero(4 * hidden, in), RowMatrix::Zero(4 * hidden, hidden),
            Eigen::VectorXd::Zero(4 * hidden)};
}

void fill_uniform(std::span<double> values, double limit, Rng& rng)
{
    for (double& v : values)
        v = rng.uniform(-limit, limit);
}

std::span<double> span_of(RowMatrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

template <typename Params, typename View, typename Fn>
std::vector<View> collect_views(Params& p, Fn make)
{
    std::vector<View> out;
    for (std::size_t l = 0; l < p.recurrent.size(); ++l) {
        auto& layer = p.recurrent[l];
        for (auto* dir : {&layer.forward, &layer.backward}) {
            const std::string prefix = "lstm" + std::to_string(l) +
                                       (dir == &layer.forward ? ".forward" : ".backward");
            out.push_back(make(prefix + ".w", dir->w));
            out.push_back(make(prefix + ".u", dir->u));
            out.push_back(make(prefix + ".b", dir->b));
        }
    }
    for (std::size_t k = 0; k < p.dense.size(); ++k) {
        const std::string prefix = "dense" + std::to_string(k);
        out.push_back(make(prefix + ".w", p.dense[k].w));
        out.push_back(make(prefix + ".b", p.dense[k].b));
    }
    return out;
}

template <typename M>
std::vector<std::size_t> shape_of(const M& m)
{
    if constexpr (M::ColsAtCompileTime == 1)
        return {static_cast<std::size_t>(m.size())};
    else
        return {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
}

// Runs one direction over the whole sequence, storing every activation in
// out. Time runs backwards when reverse is set.
void run_direction(const LstmCellParams& cell, std::size_t H, const Sequence& input, bool reverse,
                   ForwardCache::Direction& out)
{
    const std::size_t T = input.steps;
    const auto B = static_cast<Eigen::Index>(input.batch);
    const auto hh = static_cast<Eigen::Index>(H);
    const Eigen::Index cols = input.data.cols();

    // input projections for every timestep in one product
    out.gates.resize(4 * hh, cols);
    out.gates.noalias() = cell.w * input.data;
    out.gates.colwise() += cell.b;
    out.cell.resize(hh, cols);
    out.cell_tanh.resize(hh, cols);
    out.hidden.resize(hh, cols);

    for (std::size_t step = 0; step < T; ++step) {
        const std::size_t t = reverse ? T - 1 - step : step;
        const std::size_t prev = reverse ? t + 1 : t - 1;
        const auto col = static_cast<Eigen::Index>(t) * B;
        const auto pcol = static_cast<Eigen::Index>(prev) * B;
        auto z = out.gates.middleCols(col, B);
        if (step > 0)
            z.noalias() += cell.u * out.hidden.middleCols(pcol, B);

        sigmoid_inplace(z.topRows(hh));
        sigmoid_inplace(z.middleRows(hh, hh));
        tanh_into(z.middleRows(2 * hh, hh), z.middleRows(2 * hh, hh));
        sigmoid_inplace(z.bottomRows(hh));

        auto c = out.cell.middleCols(col, B);
        c = z.topRows(hh).cwiseProduct(z.middleRows(2 * hh, hh));
        if (step > 0)
            c += z.middleRows(hh, hh).cwiseProduct(out.cell.middleCols(pcol, B));
        auto tc = out.cell_tanh.middleCols(col, B);
        tanh_into(tc, c);
        out.hidden.middleCols(col, B) = z.bottomRows(hh).cwiseProduct(tc);
    }
}

// Backpropagates one direction. Rows [offset, offset + H) of d_out hold dL/dh
// for this direction; input gradients are accumulated into d_in.
void backprop_direction(const LstmCellParams& cell, LstmCellParams& grad, std::size_t H,
                        const Sequence& input, const ForwardCache::Direction& cache, bool reverse,
                        const MatrixXd& d_out, std::size_t offset, MatrixXd& d_in,
                        MatrixXd& dz_all)
{
    const std::size_t T = input.steps;
    const auto B = static_cast<Eigen::Index>(input.batch);
    const auto hh = static_cast<Eigen::Index>(H);
    const Eigen::Index cols = input.data.cols();

    dz_all.resize(4 * hh, cols);
    MatrixXd dh(hh, B);
    MatrixXd dc(hh, B);
    MatrixXd dh_next = MatrixXd::Zero(hh, B);
    MatrixXd dc_next = MatrixXd::Zero(hh, B);

    for (std::size_t step = 0; step < T; ++step) {
        // walk the processing order in reverse
        const std::size_t t = reverse ? step : T - 1 - step;
        const bool first = reverse ? (t == T - 1) : (t == 0);
        const std::size_t prev = reverse ? t + 1 : t - 1;
        const auto col = static_cast<Eigen::Index>(t) * B;

        const auto gates = cache.gates.middleCols(col, B);
        const auto i = gates.topRows(hh).array();
        const auto f = gates.middleRows(hh, hh).array();
        const auto g = gates.middleRows(2 * hh, hh).array();
        const auto o = gates.bottomRows(hh).array();
        const auto tc = cache.cell_tanh.middleCols(col, B).array();

        dh = d_out.block(static_cast<Eigen::Index>(offset), col, hh, B) + dh_next;
        dc = (dh.array() * o * (1.0 - tc.square())).matrix() + dc_next;
        const auto dha = dh.array();
        const auto dca = dc.array();

        auto dz = dz_all.middleCols(col, B);
        dz.topRows(hh) = (dca * g * i * (1.0 - i)).matrix();
        if (first)
            dz.middleRows(hh, hh).setZero();
        else
            dz.middleRows(hh, hh) =
                (dca * cache.cell.middleCols(static_cast<Eigen::Index>(prev) * B, B).array() * f *
                 (1.0 - f))
                    .matrix();
        dz.middleRows(2 * hh, hh) = (dca * i * (1.0 - g.square())).matrix();
        dz.bottomRows(hh) = (dha * tc * o * (1.0 - o)).matrix();

        dh_next.noalias() = cell.u.transpose() * dz;
        dc_next = (dca * f).matrix();
    }

    grad.w.noalias() += dz_all * input.data.transpose();
    grad.b += dz_all.rowwise().sum();
    if (T > 1) {
        const Eigen::Index span = cols - B;
        if (reverse)
            grad.u.noalias() += dz_all.leftCols(span) * cache.hidden.rightCols(span).transpose();
        else
            grad.u.noalias() += dz_all.rightCols(span) * cache.hidden.leftCols(span).transpose();
    }
    d_in.noalias() += cell.w.transpose() * dz_all;
}

void check_input(const NetworkParams& params, const Sequence& input)
{
    const auto& sz = params.sizes;
    if (input.steps != sz.seq_len)
        throw ShapeMismatch("expected " + std::to_string(sz.seq_len) + " timesteps, got " +
                            std::to_string(input.steps));
    if (input.batch < 1)
        throw ShapeMismatch("empty batch");
    if (input.data.rows() != static_cast<Eigen::Index>(sz.input_width) ||
        input.data.cols() != static_cast<Eigen::Index>(input.steps * input.batch))
        throw ShapeMismatch("input must be " + std::to_string(sz.input_width) +
                            " x (timesteps * batch)");
}

} // namespace

void NetworkSizes::validate() const
{
    if (input_width == 0 || seq_len == 0 || hidden == 0 || recurrent_layers == 0 || outputs == 0)
        throw SizeMismatch("network sizes must all be positive");
    for (std::size_t w : dense_hidden)
        if (w == 0)
            throw SizeMismatch("dense hidden widths must be positive");
}

std::size_t NetworkSizes::parameter_count() const
{
    std::size_t total = 0;
    std::size_t in = input_width;
    for (std::size_t l = 0; l < recurrent_layers; ++l) {
        total += 2 * 4 * (in * hidden + hidden * hidden + hidden);
        in = 2 * hidden;
    }
    for (std::size_t w : dense_hidden) {
        total += in * w + w;
        in = w;
    }
    return total + in * outputs + outputs;
}

NetworkParams NetworkParams::zeros(const NetworkSizes& sizes)
{
    sizes.validate();
    NetworkParams p;
    p.sizes = sizes;
    std::size_t in = sizes.input_width;
    for (std::size_t l = 0; l < sizes.recurrent_layers; ++l) {
        p.recurrent.push_back({zero_cell(in, sizes.hidden), zero_cell(in, sizes.hidden)});
        in = 2 * sizes.hidden;
    }
    for (std::size_t w : sizes.dense_hidden) {
        p.dense.push_back({RowMatrix::Zero(w, in), Eigen::VectorXd::Zero(w)});
        in = w;
    }
    p.dense.push_back({RowMatrix::Zero(sizes.outputs, in), Eigen::VectorXd::Zero(sizes.outputs)});
    return p;
}

std::vector<ParamView> NetworkParams::views()
{
    return collect_views<NetworkParams, ParamView>(*this, [](std::string n, auto& m) {
        return ParamView{std::move(n), shape_of(m), {m.data(), static_cast<std::size_t>(m.size())}};
    });
}

std::vector<ConstParamView> NetworkParams::views() const
{
    return collect_views<const NetworkParams, ConstParamView>(*this, [](std::string n, const auto& m) {
        return ConstParamView{std::move(n), shape_of(m),
                              {m.data(), static_cast<std::size_t>(m.size())}};
    });
}

std::size_t NetworkParams::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& v : views())
        n += v.values.size();
    return n;
}

bool NetworkParams::operator==(const NetworkParams& other) const
{
    if (!(sizes == other.sizes))
        return false;
    const auto a = views();
    const auto b = other.views();
    if (a.size() != b.size())
        return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].shape != b[k].shape)
            return false;
        if (std::memcmp(a[k].values.data(), b[k].values.data(),
                        a[k].values.size() * sizeof(double)) != 0)
            return false;
    }
    return true;
}

NetworkParams init_network(std::uint64_t seed, const NetworkSizes& sizes)
{
    NetworkParams p = NetworkParams::zeros(sizes);
    Rng rng(seed);
    const std::size_t H = sizes.hidden;
    std::size_t in = sizes.input_width;
    for (auto& layer : p.recurrent) {
        for (auto* cell : {&layer.forward, &layer.backward}) {
            fill_uniform(span_of(cell->w), std::sqrt(6.0 / static_cast<double>(in + 4 * H)), rng);
            fill_uniform(span_of(cell->u), std::sqrt(6.0 / static_cast<double>(H + 4 * H)), rng);
            cell->b.setZero();
            cell->b.segment(static_cast<Eigen::Index>(H), static_cast<Eigen::Index>(H)).setOnes();
        }
        in = 2 * H;
    }
    for (auto& d : p.dense) {
        const auto fan = static_cast<double>(d.w.rows() + d.w.cols());
        fill_uniform(span_of(d.w), std::sqrt(6.0 / fan), rng);
        d.b.setZero();
    }
    return p;
}

Sequence to_sequence(const Tensor& batch, const NetworkSizes& sizes)
{
    if (batch.rank() != 3 || batch.shape[1] != sizes.seq_len ||
        batch.shape[2] != sizes.input_width || batch.shape[0] == 0)
        throw ShapeMismatch("batch must be B x " + std::to_string(sizes.seq_len) + " x " +
                            std::to_string(sizes.input_width));
    const std::size_t B = batch.shape[0];
    Sequence seq(sizes.input_width, sizes.seq_len, B);
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t t = 0; t < sizes.seq_len; ++t)
            for (std::size_t f = 0; f < sizes.input_width; ++f)
                seq.data(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(t * B + b)) =
                    batch.at(b, t, f);
    return seq;
}

MatrixXd forward(const NetworkParams& params, const Sequence& input, ForwardCache* cache)
{
    check_input(params, input);
    const auto& sz = params.sizes;
    const std::size_t H = sz.hidden;
    const std::size_t T = sz.seq_len;
    const auto B = static_cast<Eigen::Index>(input.batch);
    const auto hh = static_cast<Eigen::Index>(H);

    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;
    fc.layers.resize(params.recurrent.size());
    fc.dense_input.resize(params.dense.size());
    fc.dense_pre.resize(params.dense.size());
    fc.batch = input.batch;

    for (std::size_t l = 0; l < params.recurrent.size(); ++l) {
        auto& lc = fc.layers[l];
        if (l == 0)
            lc.input = input;
        run_direction(params.recurrent[l].forward, H, lc.input, false, lc.forward);
        run_direction(params.recurrent[l].backward, H, lc.input, true, lc.backward);
        if (l + 1 < params.recurrent.size()) {
            Sequence& next = fc.layers[l + 1].input;
            next.steps = T;
            next.batch = input.batch;
            next.data.resize(2 * hh, static_cast<Eigen::Index>(T) * B);
            next.data.topRows(hh) = lc.forward.hidden;
            next.data.bottomRows(hh) = lc.backward.hidden;
        }
    }

    // each direction's last processed step: forward at T-1, backward at 0
    MatrixXd x(2 * hh, B);
    x.topRows(hh) = fc.layers.back().forward.hidden.rightCols(B);
    x.bottomRows(hh) = fc.layers.back().backward.hidden.leftCols(B);

    for (std::size_t k = 0; k < params.dense.size(); ++k) {
        fc.dense_input[k] = std::move(x);
        MatrixXd& pre = fc.dense_pre[k];
        pre.noalias() = params.dense[k].w * fc.dense_input[k];
        pre.colwise() += params.dense[k].b;
        x = k + 1 < params.dense.size() ? MatrixXd(pre.cwiseMax(0.0)) : pre;
    }
    return x;
}

Tensor forward(const NetworkParams& params, const Tensor& batch)
{
    const MatrixXd q = forward(params, to_sequence(batch, params.sizes));
    Tensor out({static_cast<std::size_t>(q.cols()), static_cast<std::size_t>(q.rows())});
    for (Eigen::Index b = 0; b < q.cols(); ++b)
        for (Eigen::Index o = 0; o < q.rows(); ++o)
            out.at(static_cast<std::size_t>(b), static_cast<std::size_t>(o)) = q(o, b);
    return out;
}

NetworkParams backward(const NetworkParams& params, const ForwardCache& cache,
                       const MatrixXd& upstream)
{
    NetworkParams grads;
    backward(params, cache, upstream, grads);
    return grads;
}

void backward(const NetworkParams& params, const ForwardCache& cache, const MatrixXd& upstream,
              NetworkParams& grads)
{
    const auto& sz = params.sizes;
    const auto B = static_cast<Eigen::Index>(cache.batch);
    if (upstream.rows() != static_cast<Eigen::Index>(sz.outputs) || upstream.cols() != B)
        throw ShapeMismatch("upstream gradient must be outputs x batch");
    if (cache.layers.size() != params.recurrent.size() ||
        cache.dense_pre.size() != params.dense.size())
        throw ShapeMismatch("forward cache does not match the network");

    if (!(grads.sizes == sz) || grads.dense.size() != params.dense.size())
        grads = NetworkParams::zeros(sz);
    for (auto& layer : grads.recurrent)
        for (auto* cell : {&layer.forward, &layer.backward}) {
            cell->w.setZero();
            cell->u.setZero();
            cell->b.setZero();
        }

    MatrixXd delta = upstream;
    for (std::size_t k = params.dense.size(); k-- > 0;) {
        if (k + 1 < params.dense.size())
            delta = delta.cwiseProduct((cache.dense_pre[k].array() > 0.0).cast<double>().matrix());
        grads.dense[k].w.noalias() = delta * cache.dense_input[k].transpose();
        grads.dense[k].b = delta.rowwise().sum();
        delta = params.dense[k].w.transpose() * delta;
    }

    const std::size_t H = sz.hidden;
    const std::size_t T = sz.seq_len;
    const auto hh = static_cast<Eigen::Index>(H);

    const Eigen::Index cols = static_cast<Eigen::Index>(T) * B;
    // grad[l] holds dL/d(input of layer l); grad[L] the top layer's output
    auto& grad = cache.scratch.layer_grads;
    const std::size_t L = params.recurrent.size();
    grad.resize(L + 1);
    grad[L].setZero(2 * hh, cols);
    grad[L].topRows(hh).rightCols(B) = delta.topRows(hh);
    grad[L].bottomRows(hh).leftCols(B) += delta.bottomRows(hh);

    for (std::size_t l = L; l-- > 0;) {
        const auto& lc = cache.layers[l];
        grad[l].setZero(lc.input.data.rows(), cols);
        backprop_direction(params.recurrent[l].forward, grads.recurrent[l].forward, H, lc.input,
                           lc.forward, false, grad[l + 1], 0, grad[l], cache.scratch.dz);
        backprop_direction(params.recurrent[l].backward, grads.recurrent[l].backward, H, lc.input,
                           lc.backward, true, grad[l + 1], H, grad[l], cache.scratch.dz);
    }
}

NetworkParams backward(const NetworkParams& params, const Tensor& batch, const Tensor& upstream)
{
    ForwardCache cache;
    forward(params, to_sequence(batch, params.sizes), &cache);
    if (upstream.rank() != 2 || upstream.shape[0] != cache.batch ||
        upstream.shape[1] != params.sizes.outputs)
        throw ShapeMismatch("upstream gradient must be B x outputs");
    MatrixXd up(params.sizes.outputs, cache.batch);
    for (std::size_t b = 0; b < cache.batch; ++b)
        for (std::size_t o = 0; o < params.sizes.outputs; ++o)
            up(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(b)) = upstream.at(b, o);
    return backward(params, cache, up);
}

} // namespace epictrl

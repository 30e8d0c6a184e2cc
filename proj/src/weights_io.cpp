#include "epictrl/weights_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "epictrl/checksum.hpp"
#include "epictrl/errors.hpp"

namespace epictrl {

namespace {

static_assert(std::endian::native == std::endian::little,
              "weight archives are written in host order, which must be little-endian");

class Writer {
public:
    void bytes(const void* p, std::size_t n)
    {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u32(std::uint32_t v) { bytes(&v, sizeof v); }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void f64(double v) { bytes(&v, sizeof v); }

    std::vector<std::uint8_t>& buffer() { return out_; }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    void bytes(void* p, std::size_t n)
    {
        if (n > in_.size() - pos_)
            throw FormatError("weight archive truncated at byte " + std::to_string(pos_));
        std::memcpy(p, in_.data() + pos_, n);
        pos_ += n;
    }
    std::uint32_t u32()
    {
        std::uint32_t v;
        bytes(&v, sizeof v);
        return v;
    }
    std::uint64_t u64()
    {
        std::uint64_t v;
        bytes(&v, sizeof v);
        return v;
    }
    std::size_t remaining() const { return in_.size() - pos_; }
    std::size_t position() const { return pos_; }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

std::uint32_t narrow(std::size_t v) { return static_cast<std::uint32_t>(v); }

} // namespace

std::vector<std::uint8_t> encode_weights(const NetworkParams& params)
{
    Writer w;
    w.bytes(kWeightsMagic.data(), kWeightsMagic.size());
    w.u32(kWeightsVersion);

    const auto& sz = params.sizes;
    w.u32(narrow(sz.input_width));
    w.u32(narrow(sz.seq_len));
    w.u32(narrow(sz.hidden));
    w.u32(narrow(sz.recurrent_layers));
    w.u32(narrow(sz.dense_hidden.size()));
    for (std::size_t d : sz.dense_hidden)
        w.u32(narrow(d));
    w.u32(narrow(sz.outputs));

    for (const auto& view : params.views()) {
        w.u32(narrow(view.name.size()));
        w.bytes(view.name.data(), view.name.size());
        w.u32(narrow(view.shape.size()));
        for (std::size_t d : view.shape)
            w.u64(d);
        for (double v : view.values)
            w.f64(v);
    }
    w.u64(fnv1a64(w.buffer()));
    return std::move(w.buffer());
}

NetworkParams decode_weights(std::span<const std::uint8_t> bytes)
{
    Reader r(bytes);
    std::string magic(kWeightsMagic.size(), '\0');
    if (bytes.size() < magic.size())
        throw FormatError("weight archive truncated: no magic");
    r.bytes(magic.data(), magic.size());
    if (magic != kWeightsMagic)
        throw FormatError("not a weight archive (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kWeightsVersion)
        throw FormatError("unsupported weight archive version: found " + std::to_string(version) +
                          ", expected " + std::to_string(kWeightsVersion));
    if (bytes.size() < r.position() + sizeof(std::uint64_t))
        throw FormatError("weight archive truncated: no checksum");

    const std::size_t body = bytes.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + body, sizeof stored);
    if (fnv1a64(bytes.first(body)) != stored)
        throw FormatError("weight archive checksum mismatch (truncated or corrupted)");

    Reader rb(bytes.first(body));
    rb.bytes(magic.data(), magic.size());
    rb.u32();

    NetworkSizes sz;
    sz.input_width = rb.u32();
    sz.seq_len = rb.u32();
    sz.hidden = rb.u32();
    sz.recurrent_layers = rb.u32();
    const std::uint32_t dense_count = rb.u32();
    if (dense_count > 64)
        throw FormatError("weight archive declares " + std::to_string(dense_count) +
                          " dense layers");
    sz.dense_hidden.clear();
    for (std::uint32_t k = 0; k < dense_count; ++k)
        sz.dense_hidden.push_back(rb.u32());
    sz.outputs = rb.u32();
    try {
        sz.validate();
    } catch (const SizeMismatch& e) {
        throw FormatError(std::string("weight archive sizes invalid: ") + e.what());
    }

    NetworkParams params = NetworkParams::zeros(sz);
    for (auto& view : params.views()) {
        const std::uint32_t name_len = rb.u32();
        if (name_len > 256)
            throw FormatError("weight archive record name too long");
        std::string record(name_len, '\0');
        rb.bytes(record.data(), name_len);
        if (record != view.name)
            throw FormatError("weight archive record '" + record + "' where '" + view.name +
                              "' was expected");
        const std::uint32_t rank = rb.u32();
        std::vector<std::size_t> dims(rank);
        for (auto& d : dims)
            d = rb.u64();
        if (dims != view.shape)
            throw FormatError("weight archive record '" + record + "' has the wrong shape");
        rb.bytes(view.values.data(), view.values.size() * sizeof(double));
    }
    if (rb.remaining() != 0)
        throw FormatError("weight archive has " + std::to_string(rb.remaining()) +
                          " trailing bytes");
    return params;
}

void save_weights(const NetworkParams& params, const std::filesystem::path& path)
{
    const auto bytes = encode_weights(params);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("failed writing " + path.string());
}

NetworkParams load_weights(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                          std::istreambuf_iterator<char>()};
    return decode_weights(bytes);
}

} // namespace epictrl

// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/he/serialize.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "heact/error.hpp"

namespace heact::he {

namespace {

class Writer {
public:
    void magic(const char (&m)[5]) { bytes_.insert(bytes_.end(), m, m + 4); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    void put(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
    void expect_magic(const char (&m)[5]) {
        need(4);
        if (std::memcmp(b_.data() + pos_, m, 4) != 0) throw ParseError(std::string("bad magic, expected ") + m, 0);
        pos_ += 4;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    bool done() const { return pos_ == b_.size(); }

private:
    void need(std::size_t k) const {
        if (b_.size() - pos_ < k) throw ParseError("truncated buffer", 0);
    }
    std::uint64_t get(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(width);
        return v;
    }
    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 0;
};

void write_words(Writer& w, const RnsPoly& p) {
    w.u64(p.data.size());
    for (auto x : p.data) w.u64(x);
}

void read_words(Reader& r, RnsPoly& p) {
    const std::uint64_t count = r.u64();
    if (count != p.data.size()) throw ParseError("word count does not match ring shape", 0);
    for (auto& x : p.data) x = r.u64();
}

void write_poly(Writer& w, const RnsPoly& p) {
    w.u32(static_cast<std::uint32_t>(p.limbs()));
    for (auto i : p.primes) w.u32(i);
    write_words(w, p);
}

RnsPoly read_poly(Reader& r, const CkksContext& ctx) {
    const std::uint32_t limbs = r.u32();
    if (limbs == 0 || limbs > ctx.special_index() + 1u) throw ParseError("bad limb count", 0);
    std::vector<std::uint32_t> primes(limbs);
    for (auto& p : primes) {
        p = r.u32();
        if (p > ctx.special_index()) throw ParseError("prime index out of range", 0);
    }
    RnsPoly poly(ctx.n(), std::move(primes));
    read_words(r, poly);
    return poly;
}

}  // namespace

std::vector<std::uint8_t> serialize(const Ciphertext& ct) {
    Writer w;
    w.magic("CKT1");
    const std::size_t n = ct.parts.empty() ? 0 : ct.parts[0].n;
    w.u32(static_cast<std::uint32_t>(n));
    w.u32(static_cast<std::uint32_t>(ct.level));
    w.u32(static_cast<std::uint32_t>(std::lround(std::log2(ct.scale))));
    w.f64(ct.scale);
    w.u32(static_cast<std::uint32_t>(ct.mult_count));
    w.u32(static_cast<std::uint32_t>(ct.parts.size()));
    for (const auto& p : ct.parts) write_words(w, p);
    return w.take();
}

Ciphertext deserialize_ciphertext(std::span<const std::uint8_t> bytes, const CkksContext& ctx) {
    Reader r(bytes);
    r.expect_magic("CKT1");
    if (r.u32() != ctx.n()) throw ParseError("ring degree does not match parameters", 0);
    Ciphertext ct;
    ct.level = static_cast<int>(r.u32());
    if (ct.level > ctx.max_level()) throw ParseError("level beyond modulus chain", 0);
    const std::uint32_t scale_exp = r.u32();
    ct.scale = r.f64();
    if (!(ct.scale > 0.0) || std::lround(std::log2(ct.scale)) != static_cast<long>(scale_exp)) {
        throw ParseError("scale does not match header exponent", 0);
    }
    ct.mult_count = static_cast<int>(r.u32());
    const std::uint32_t parts = r.u32();
    if (parts != 2 && parts != 3) throw ParseError("ciphertext must have 2 or 3 parts", 0);
    for (std::uint32_t i = 0; i < parts; ++i) {
        RnsPoly p(ctx.n(), ctx.level_primes(ct.level));
        read_words(r, p);
        ct.parts.push_back(std::move(p));
    }
    if (!r.done()) throw ParseError("trailing bytes after ciphertext", 0);
    return ct;
}

std::vector<std::uint8_t> serialize(const KeySet& keys, const CkksContext& ctx) {
    Writer w;
    w.magic("KEY1");
    w.u32(static_cast<std::uint32_t>(ctx.n()));
    w.u32(static_cast<std::uint32_t>(ctx.max_level()));
    w.u32(static_cast<std::uint32_t>(keys.relin_key.size()));
    w.u64(keys.seed);
    write_poly(w, keys.secret);
    write_poly(w, keys.public_key[0]);
    write_poly(w, keys.public_key[1]);
    for (const auto& pair : keys.relin_key) {
        write_poly(w, pair[0]);
        write_poly(w, pair[1]);
    }
    return w.take();
}

KeySet deserialize_keyset(std::span<const std::uint8_t> bytes, const CkksContext& ctx) {
    Reader r(bytes);
    r.expect_magic("KEY1");
    if (r.u32() != ctx.n()) throw ParseError("ring degree does not match parameters", 0);
    if (static_cast<int>(r.u32()) != ctx.max_level()) throw ParseError("chain length does not match", 0);
    const std::uint32_t digits = r.u32();
    if (digits != static_cast<std::uint32_t>(ctx.max_level()) + 1) throw ParseError("bad digit count", 0);
    KeySet keys;
    keys.seed = r.u64();
    keys.secret = read_poly(r, ctx);
    keys.public_key[0] = read_poly(r, ctx);
    keys.public_key[1] = read_poly(r, ctx);
    for (std::uint32_t i = 0; i < digits; ++i) {
        RnsPoly b = read_poly(r, ctx);
        RnsPoly a = read_poly(r, ctx);
        keys.relin_key.push_back({std::move(b), std::move(a)});
    }
    if (!r.done()) throw ParseError("trailing bytes after key set", 0);
    return keys;
}

std::size_t ct_bytes(const Ciphertext& ct) {
    std::size_t total = 16 + 8 + 4 + 4;
    for (const auto& p : ct.parts) total += 8 + 8 * p.data.size();
    return total;
}

}  // namespace heact::he

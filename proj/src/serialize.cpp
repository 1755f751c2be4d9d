#include "pttk/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

namespace pttk {

static_assert(std::endian::native == std::endian::little,
              "PTTK1 writes native scalars and requires a little-endian host");

namespace {

constexpr char kMagic[5] = {'P', 'T', 'T', 'K', '1'};
constexpr std::uint8_t kKindParametric = 1;
constexpr std::uint8_t kKindGlobal = 2;

enum SectionId : std::uint32_t {
    kMeta = 1,
    kGrid = 2,
    kMatrixA = 3, // S (parametric) or Q (global)
    kMatrixB = 4, // T (parametric) or R (global)
    kParamCores = 5,
};

class Writer {
public:
    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void f64(double v) { raw(&v, 8); }
    void f64s(const double* p, std::size_t count) { raw(p, count * 8); }
    void raw(const void* p, std::size_t count) {
        const char* c = static_cast<const char*>(p);
        buf_.insert(buf_.end(), c, c + count);
    }
    const std::string& str() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    std::uint8_t u8() { return take<std::uint8_t>(); }
    std::uint32_t u32() { return take<std::uint32_t>(); }
    std::uint64_t u64() { return take<std::uint64_t>(); }
    double f64() { return take<double>(); }
    void f64s(double* p, std::size_t count) { raw(p, count * 8); }
    void raw(void* p, std::size_t count) {
        if (pos_ + count > data_.size()) throw PttkIoError("PTTK1: truncated file");
        std::memcpy(p, data_.data() + pos_, count);
        pos_ += count;
    }
    std::string take_string(std::size_t count) {
        if (pos_ + count > data_.size()) throw PttkIoError("PTTK1: truncated file");
        std::string s(data_.data() + pos_, count);
        pos_ += count;
        return s;
    }
    std::size_t pos() const { return pos_; }
    bool done() const { return pos_ == data_.size(); }

private:
    template <typename T>
    T take() {
        T v;
        raw(&v, sizeof(T));
        return v;
    }
    std::string data_;
    std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::string_view payload) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
                static_cast<uInt>(payload.size())));
}

void write_section(Writer& out, std::uint32_t id, const Writer& payload) {
    out.u32(id);
    out.u64(payload.str().size());
    out.raw(payload.str().data(), payload.str().size());
    out.u32(crc32_of(payload.str()));
}

void write_matrix(Writer& w, const Matrix& m) {
    w.u64(static_cast<std::uint64_t>(m.rows()));
    w.u64(static_cast<std::uint64_t>(m.cols()));
    w.f64s(m.data(), static_cast<std::size_t>(m.size()));
}

Matrix read_matrix(Reader& r) {
    const auto rows = static_cast<Index>(r.u64());
    const auto cols = static_cast<Index>(r.u64());
    if (rows < 0 || cols < 0) throw PttkIoError("PTTK1: negative matrix dims");
    Matrix m(rows, cols);
    r.f64s(m.data(), static_cast<std::size_t>(m.size()));
    return m;
}

void write_intervals(Writer& w, const std::vector<Interval>& ivs) {
    w.u64(ivs.size());
    for (const auto& iv : ivs) {
        w.f64(iv.lo);
        w.f64(iv.hi);
    }
}

std::vector<Interval> read_intervals(Reader& r) {
    const auto count = r.u64();
    std::vector<Interval> ivs(count);
    for (auto& iv : ivs) {
        iv.lo = r.f64();
        iv.hi = r.f64();
    }
    return ivs;
}

struct MetaFields {
    KernelSpec spec;
    ProblemGeometry geom;
    Index n = 0;
    double eps = 0.0;
    std::uint64_t seed = 0;
    bool converged = false;
    double sampled_error = 0.0;
    Index ns = 0, nt = 0;
    std::uint64_t offline_kernel_evals = 0;
    std::vector<Index> cross_ranks;
    Index split = 0;       // global only
    bool clip_default = false; // global only
};

void write_meta(Writer& w, const MetaFields& m) {
    w.u64(static_cast<std::uint64_t>(m.spec.family));
    w.u8(m.spec.fixed_ell.has_value());
    w.f64(m.spec.fixed_ell.value_or(0.0));
    w.u8(m.spec.fixed_nu.has_value());
    w.f64(m.spec.fixed_nu.value_or(0.0));
    w.u64(static_cast<std::uint64_t>(m.geom.d));
    w.u64(static_cast<std::uint64_t>(m.geom.d_theta));
    write_intervals(w, m.geom.source_box);
    write_intervals(w, m.geom.target_box);
    write_intervals(w, m.geom.theta_box);
    w.u64(static_cast<std::uint64_t>(m.n));
    w.f64(m.eps);
    w.u64(m.seed);
    w.u8(m.converged);
    w.f64(m.sampled_error);
    w.u64(static_cast<std::uint64_t>(m.ns));
    w.u64(static_cast<std::uint64_t>(m.nt));
    w.u64(m.offline_kernel_evals);
    w.u64(m.cross_ranks.size());
    for (Index rk : m.cross_ranks) w.u64(static_cast<std::uint64_t>(rk));
    w.u64(static_cast<std::uint64_t>(m.split));
    w.u8(m.clip_default);
}

MetaFields read_meta(Reader& r) {
    MetaFields m;
    m.spec.family = static_cast<KernelFamily>(r.u64());
    if (r.u8()) m.spec.fixed_ell = r.f64(); else (void)r.f64();
    if (r.u8()) m.spec.fixed_nu = r.f64(); else (void)r.f64();
    m.geom.d = static_cast<Index>(r.u64());
    m.geom.d_theta = static_cast<Index>(r.u64());
    m.geom.source_box = read_intervals(r);
    m.geom.target_box = read_intervals(r);
    m.geom.theta_box = read_intervals(r);
    m.n = static_cast<Index>(r.u64());
    m.eps = r.f64();
    m.seed = r.u64();
    m.converged = r.u8() != 0;
    m.sampled_error = r.f64();
    m.ns = static_cast<Index>(r.u64());
    m.nt = static_cast<Index>(r.u64());
    m.offline_kernel_evals = r.u64();
    const auto n_ranks = r.u64();
    m.cross_ranks.resize(n_ranks);
    for (auto& rk : m.cross_ranks) rk = static_cast<Index>(r.u64());
    m.split = static_cast<Index>(r.u64());
    m.clip_default = r.u8() != 0;
    return m;
}

void write_grid(Writer& w, const ChebyshevGrid& grid) {
    w.u64(static_cast<std::uint64_t>(grid.dims()));
    w.u64(static_cast<std::uint64_t>(grid.n()));
    for (Index j = 0; j < grid.dims(); ++j) {
        w.f64(grid.interval(j).lo);
        w.f64(grid.interval(j).hi);
    }
}

ChebyshevGrid read_grid(Reader& r) {
    const auto dims = static_cast<Index>(r.u64());
    const auto n = static_cast<Index>(r.u64());
    std::vector<Interval> ivs(static_cast<std::size_t>(dims));
    for (auto& iv : ivs) {
        iv.lo = r.f64();
        iv.hi = r.f64();
    }
    return {n, std::move(ivs)};
}

void write_cores(Writer& w, const std::vector<DenseTensor>& cores) {
    w.u64(cores.size());
    for (const auto& c : cores) {
        w.u64(static_cast<std::uint64_t>(c.dim(0)));
        w.u64(static_cast<std::uint64_t>(c.dim(1)));
        w.u64(static_cast<std::uint64_t>(c.dim(2)));
        w.f64s(c.data(), static_cast<std::size_t>(c.size()));
    }
}

std::vector<DenseTensor> read_cores(Reader& r) {
    const auto count = r.u64();
    std::vector<DenseTensor> cores;
    cores.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto r0 = static_cast<Index>(r.u64());
        const auto n = static_cast<Index>(r.u64());
        const auto r1 = static_cast<Index>(r.u64());
        DenseTensor c({r0, n, r1});
        r.f64s(c.data(), static_cast<std::size_t>(c.size()));
        cores.push_back(std::move(c));
    }
    return cores;
}

std::string encode(std::uint8_t kind, const MetaFields& meta, const ChebyshevGrid& grid,
                   const Matrix& a, const Matrix& b, const std::vector<DenseTensor>& cores) {
    Writer out;
    out.raw(kMagic, sizeof(kMagic));
    out.u8(kind);

    Writer meta_w;
    write_meta(meta_w, meta);
    write_section(out, kMeta, meta_w);

    Writer grid_w;
    write_grid(grid_w, grid);
    write_section(out, kGrid, grid_w);

    Writer a_w;
    write_matrix(a_w, a);
    write_section(out, kMatrixA, a_w);

    Writer b_w;
    write_matrix(b_w, b);
    write_section(out, kMatrixB, b_w);

    Writer cores_w;
    write_cores(cores_w, cores);
    write_section(out, kParamCores, cores_w);
    return out.str();
}

struct Decoded {
    std::uint8_t kind;
    MetaFields meta;
    ChebyshevGrid grid;
    Matrix a, b;
    std::vector<DenseTensor> cores;
};

Decoded decode(std::string bytes) {
    Reader r(std::move(bytes));
    char magic[5];
    r.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw PttkIoError("PTTK1: bad magic (not a PTTK1 file or unsupported version)");

    Decoded d;
    d.kind = r.u8();
    if (d.kind != kKindParametric && d.kind != kKindGlobal)
        throw PttkIoError("PTTK1: unknown factorization kind");

    bool have[6] = {false};
    while (!r.done()) {
        const std::uint32_t id = r.u32();
        const std::uint64_t len = r.u64();
        std::string body = r.take_string(len);
        const std::uint32_t crc = r.u32();
        if (crc != crc32_of(body)) throw PttkIoError("PTTK1: section CRC mismatch");

        Reader pr(std::move(body));
        switch (id) {
            case kMeta: d.meta = read_meta(pr); break;
            case kGrid: d.grid = read_grid(pr); break;
            case kMatrixA: d.a = read_matrix(pr); break;
            case kMatrixB: d.b = read_matrix(pr); break;
            case kParamCores: d.cores = read_cores(pr); break;
            default: break; // unknown sections are skipped
        }
        if (id >= 1 && id <= 5) have[id] = true;
    }
    for (int id = 1; id <= 5; ++id)
        if (!have[id]) throw PttkIoError("PTTK1: missing section " + std::to_string(id));
    return d;
}

MetaFields meta_of(const ParametricFactorization& f) {
    MetaFields m;
    m.spec = f.spec;
    m.geom = f.geom;
    m.n = f.n;
    m.eps = f.eps;
    m.seed = f.seed;
    m.converged = f.converged;
    m.sampled_error = f.sampled_error;
    m.ns = f.ns;
    m.nt = f.nt;
    m.offline_kernel_evals = f.offline_kernel_evals;
    m.cross_ranks = f.cross_ranks;
    m.split = 0;
    m.clip_default = false;
    return m;
}

MetaFields meta_of(const GlobalFactorization& g) {
    MetaFields m;
    m.spec = g.spec;
    m.geom = g.geom;
    m.n = g.n;
    m.eps = g.eps;
    m.seed = g.seed;
    m.converged = g.converged;
    m.sampled_error = g.sampled_error;
    m.ns = g.ns;
    m.nt = g.ns;
    m.offline_kernel_evals = g.offline_kernel_evals;
    m.cross_ranks = g.cross_ranks;
    m.split = g.split;
    m.clip_default = g.clip_default;
    return m;
}

std::string encode_any(const ParametricFactorization& f) {
    return encode(kKindParametric, meta_of(f), f.grid, f.s, f.t, f.param_cores);
}

std::string encode_any(const GlobalFactorization& g) {
    return encode(kKindGlobal, meta_of(g), g.grid, g.q, g.r, g.param_cores);
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PttkIoError("PTTK1: cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw PttkIoError("PTTK1: write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PttkIoError("PTTK1: cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

} // namespace

void save(const ParametricFactorization& f, const std::string& path) {
    write_file(path, encode_any(f));
}

void save(const GlobalFactorization& g, const std::string& path) {
    write_file(path, encode_any(g));
}

LoadedFactorization load(const std::string& path) {
    Decoded d = decode(read_file(path));
    if (d.kind == kKindParametric) {
        ParametricFactorization f;
        f.s = std::move(d.a);
        f.t = std::move(d.b);
        f.param_cores = std::move(d.cores);
        f.grid = std::move(d.grid);
        f.spec = d.meta.spec;
        f.geom = std::move(d.meta.geom);
        f.n = d.meta.n;
        f.eps = d.meta.eps;
        f.seed = d.meta.seed;
        f.converged = d.meta.converged;
        f.sampled_error = d.meta.sampled_error;
        f.ns = d.meta.ns;
        f.nt = d.meta.nt;
        f.offline_kernel_evals = d.meta.offline_kernel_evals;
        f.cross_ranks = std::move(d.meta.cross_ranks);
        return f;
    }
    GlobalFactorization g;
    g.q = std::move(d.a);
    g.r = std::move(d.b);
    g.split = d.meta.split;
    g.param_cores = std::move(d.cores);
    g.grid = std::move(d.grid);
    g.spec = d.meta.spec;
    g.geom = std::move(d.meta.geom);
    g.n = d.meta.n;
    g.eps = d.meta.eps;
    g.seed = d.meta.seed;
    g.converged = d.meta.converged;
    g.sampled_error = d.meta.sampled_error;
    g.ns = d.meta.ns;
    g.offline_kernel_evals = d.meta.offline_kernel_evals;
    g.clip_default = d.meta.clip_default;
    g.cross_ranks = std::move(d.meta.cross_ranks);
    return g;
}

ParametricFactorization load_parametric(const std::string& path) {
    auto any = load(path);
    if (auto* f = std::get_if<ParametricFactorization>(&any)) return std::move(*f);
    throw PttkIoError("PTTK1: file holds a global factorization, expected parametric");
}

GlobalFactorization load_global(const std::string& path) {
    auto any = load(path);
    if (auto* g = std::get_if<GlobalFactorization>(&any)) return std::move(*g);
    throw PttkIoError("PTTK1: file holds a parametric factorization, expected global");
}

std::size_t serialized_size(const ParametricFactorization& f) { return encode_any(f).size(); }
std::size_t serialized_size(const GlobalFactorization& g) { return encode_any(g).size(); }

} // namespace pttk

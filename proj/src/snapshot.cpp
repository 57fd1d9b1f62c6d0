#include "crflow/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "crflow/errors.hpp"

namespace crflow {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::vector<char>& buf, std::size_t offset, T v) {
    std::memcpy(buf.data() + offset, &v, sizeof(T));
}

template <class T>
T get(const std::vector<char>& buf, std::size_t offset) {
    T v;
    std::memcpy(&v, buf.data() + offset, sizeof(T));
    return v;
}

void write_raw(const std::string& path, const Grid& grid, std::uint32_t components, const double* values,
               const SnapshotMeta& meta) {
    std::vector<char> header(kSnapshotHeaderBytes, 0);
    std::memcpy(header.data(), kSnapshotMagic, 8);
    put<std::uint32_t>(header, 8, kSnapshotVersion);
    for (int a = 0; a < 3; ++a) put<std::uint32_t>(header, 12 + 4 * a, static_cast<std::uint32_t>(grid.n[a]));
    for (int a = 0; a < 3; ++a) put<double>(header, 24 + 8 * a, grid.period[a]);
    put<std::uint32_t>(header, 48, components);
    put<std::uint32_t>(header, 52, static_cast<std::uint32_t>(grid.order));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open snapshot for writing: " + path, 0, "output");
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(values),
              static_cast<std::streamsize>(grid.size() * components * sizeof(double)));
    if (!out) throw ConfigError("failed writing snapshot: " + path, 0, "output");

    std::ofstream side(path + ".meta", std::ios::trunc);
    if (!side) throw ConfigError("cannot open snapshot sidecar: " + path + ".meta", 0, "output");
    side << "format = crflow-snapshot\n";
    side << "version = " << kSnapshotVersion << "\n";
    side << "components = " << components << "\n";
    for (const auto& [k, v] : meta) side << k << " = " << v << "\n";
}

std::vector<char> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open snapshot: " + path, 0, "input");
    return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

SnapshotHeader parse_header(const std::vector<char>& buf, const std::string& path) {
    if (buf.size() < kSnapshotHeaderBytes || std::memcmp(buf.data(), kSnapshotMagic, 8) != 0)
        throw ConfigError("not a crflow snapshot: " + path, 0, "input");
    if (get<std::uint32_t>(buf, 8) != kSnapshotVersion)
        throw ConfigError("unsupported snapshot version in " + path, 0, "input");
    SnapshotHeader h;
    for (int a = 0; a < 3; ++a) h.n[a] = static_cast<int>(get<std::uint32_t>(buf, 12 + 4 * a));
    for (int a = 0; a < 3; ++a) h.period[a] = get<double>(buf, 24 + 8 * a);
    h.components = get<std::uint32_t>(buf, 48);
    h.order = get<std::uint32_t>(buf, 52);
    h.grid().validate();
    const std::size_t need = kSnapshotHeaderBytes + h.grid().size() * h.components * sizeof(double);
    if (buf.size() != need) throw ConfigError("snapshot payload has the wrong length: " + path, 0, "input");
    return h;
}

}  // namespace

Grid SnapshotHeader::grid() const {
    Grid g;
    g.n = n;
    g.period = period;
    g.order = static_cast<int>(order);
    return g;
}

void write_snapshot(const std::string& path, const ScalarField& f, const SnapshotMeta& meta) {
    write_raw(path, f.grid, 1, f.data.data(), meta);
}

void write_snapshot(const std::string& path, const SymTensorField& f, const SnapshotMeta& meta) {
    static_assert(sizeof(Sym3) == 6 * sizeof(double));
    write_raw(path, f.grid, 6, f.data.front().c.data(), meta);
}

SnapshotHeader read_snapshot_header(const std::string& path) { return parse_header(read_all(path), path); }

ScalarField read_scalar_snapshot(const std::string& path) {
    const std::vector<char> buf = read_all(path);
    const SnapshotHeader h = parse_header(buf, path);
    if (h.components != 1) throw ConfigError("expected a scalar snapshot: " + path, 0, "input");
    ScalarField f(h.grid());
    std::memcpy(f.data.data(), buf.data() + kSnapshotHeaderBytes, f.size() * sizeof(double));
    return f;
}

SymTensorField read_tensor_snapshot(const std::string& path) {
    const std::vector<char> buf = read_all(path);
    const SnapshotHeader h = parse_header(buf, path);
    if (h.components != 6) throw ConfigError("expected a symmetric tensor snapshot: " + path, 0, "input");
    SymTensorField f(h.grid());
    std::memcpy(f.data.front().c.data(), buf.data() + kSnapshotHeaderBytes, f.size() * 6 * sizeof(double));
    return f;
}

SnapshotMeta read_snapshot_meta(const std::string& path) {
    SnapshotMeta meta;
    std::ifstream in(path + ".meta");
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        meta[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return meta;
}

}  // namespace crflow

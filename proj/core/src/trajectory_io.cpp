#include "mkdv/trajectory_io.hpp"

#include "mkdv/norms.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace mkdv::io {

static_assert(std::endian::native == std::endian::little, "trajectory format assumes a little-endian host");

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("read_trajectory: truncated file");
    return v;
}

} // namespace

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_trajectory: cannot open " + path.string());
    os.write(kTrajectoryMagic, sizeof kTrajectoryMagic);
    put<std::uint32_t>(os, kTrajectoryVersion);
    put<std::uint32_t>(os, 0);
    put<double>(os, traj.grid.length());
    put<std::uint64_t>(os, traj.grid.points());
    put<std::uint64_t>(os, traj.snapshots.size());
    put<double>(os, traj.dt);
    put<std::int32_t>(os, traj.sign);
    put<std::int32_t>(os, 0);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        put<double>(os, traj.times[i]);
        for (auto v : traj.snapshots[i].samples()) {
            put<double>(os, v.real());
            put<double>(os, v.imag());
        }
    }
    if (!os) throw std::runtime_error("write_trajectory: write failed for " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_trajectory: cannot open " + path.string());
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kTrajectoryMagic, sizeof magic) != 0)
        throw std::runtime_error("read_trajectory: bad magic in " + path.string());
    if (get<std::uint32_t>(is) != kTrajectoryVersion)
        throw std::runtime_error("read_trajectory: unsupported version");
    get<std::uint32_t>(is);
    const double L = get<double>(is);
    const auto M = get<std::uint64_t>(is);
    const auto K = get<std::uint64_t>(is);
    const double dt = get<double>(is);
    const auto sign = get<std::int32_t>(is);
    get<std::int32_t>(is);

    GridSpec grid(L, static_cast<std::size_t>(M));
    Trajectory traj{grid, dt, sign, {}, {}, {}};
    for (std::uint64_t i = 0; i < K; ++i) {
        traj.times.push_back(get<double>(is));
        std::vector<cplx> samples(static_cast<std::size_t>(M));
        for (auto& v : samples) {
            const double re = get<double>(is);
            const double im = get<double>(is);
            v = {re, im};
        }
        traj.snapshots.emplace_back(grid, std::move(samples));
        traj.invariants.push_back(invariants(traj.snapshots.back()));
    }
    return traj;
}

void write_invariants_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::vector<std::string>& header_comments, const std::vector<NormColumn>& norms) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_invariants_csv: cannot open " + path.string());
    for (const auto& line : header_comments) os << "# " << line << '\n';
    os << "t,mass,momentum";
    for (const auto& n : norms) os << ',' << n.name;
    os << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        os << traj.times[i] << ',' << traj.invariants[i].mass << ',' << traj.invariants[i].momentum;
        if (!norms.empty()) {
            const SpectralField F = forward_transform(traj.snapshots[i]);
            for (const auto& n : norms) os << ',' << modulation_norm(F, n.s, n.p);
        }
        os << '\n';
    }
}

} // namespace mkdv::io

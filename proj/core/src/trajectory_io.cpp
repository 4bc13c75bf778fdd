#include "fkpp/trajectory_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <limits>

#include "fkpp/error.hpp"

namespace fkpp {

namespace {

std::uint64_t to_little(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return out;
}

}  // namespace

void write_frame_header(std::ostream& os, std::size_t space_nodes) {
    os << "t";
    for (std::size_t i = 0; i < space_nodes; ++i) os << ",rho_" << i;
    os << '\n';
}

void write_frame(std::ostream& os, const SimState& state) {
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << state.t;
    for (double v : state.rho) os << ',' << v;
    os << '\n';
    os.precision(old);
}

void write_dense_dump(const std::filesystem::path& path, std::span<const double> u) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    for (double v : u) {
        std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
        char buf[8];
        std::memcpy(buf, &bits, 8);
        out.write(buf, 8);
    }
    if (!out) throw Error("write to " + path.string() + " failed");
}

std::vector<double> read_dense_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    const auto size = std::filesystem::file_size(path);
    if (size % 8 != 0) throw Error(path.string() + " is not a float64 dump");
    std::vector<double> u(size / 8);
    char buf[8];
    for (double& v : u) {
        in.read(buf, 8);
        std::uint64_t bits;
        std::memcpy(&bits, buf, 8);
        v = std::bit_cast<double>(to_little(bits));
    }
    return u;
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& dir, const Grid& grid,
                                   std::vector<double> checkpoints, std::size_t frame_stride)
    : dir_(dir), checkpoints_(std::move(checkpoints)), stride_(std::max<std::size_t>(1, frame_stride)) {
    std::filesystem::create_directories(dir_);
    std::sort(checkpoints_.begin(), checkpoints_.end());
    csv_ = std::make_shared<std::ofstream>(dir_ / "rho_frames.csv");
    if (!*csv_) throw Error("cannot open " + (dir_ / "rho_frames.csv").string());
    write_frame_header(*csv_, grid.space_nodes());
}

void TrajectoryWriter::operator()(const SimState& state) {
    if (seen_++ % stride_ == 0) {
        write_frame(*csv_, state);
        ++frames_;
    }
    while (next_checkpoint_ < checkpoints_.size() &&
           state.t >= checkpoints_[next_checkpoint_] - 1e-12) {
        write_dense_dump(dir_ / ("u_" + std::to_string(next_checkpoint_) + ".bin"), state.u);
        ++next_checkpoint_;
    }
    csv_->flush();
}

StepObserver TrajectoryWriter::observer() {
    return [this](const SimState& s) { (*this)(s); };
}

}  // namespace fkpp

#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "fkpp/dynamics.hpp"

namespace fkpp {

/// "t,rho_0,...,rho_{n-1}" for n spatial nodes.
void write_frame_header(std::ostream& os, std::size_t space_nodes);
/// One CSV row: t followed by rho, 17 significant digits.
void write_frame(std::ostream& os, const SimState& state);

/// Raw dump of u: little-endian IEEE-754 float64, no header, in grid node
/// order (phenotype index fastest).
void write_dense_dump(const std::filesystem::path& path, std::span<const double> u);
std::vector<double> read_dense_dump(const std::filesystem::path& path);

/// Streams a simulation to `dir`: rho frames to rho_frames.csv (every
/// `frame_stride`-th observed state),
/// and a dense dump u_<k>.bin the first time t reaches checkpoint k.
class TrajectoryWriter {
public:
    TrajectoryWriter(const std::filesystem::path& dir, const Grid& grid,
                     std::vector<double> checkpoints = {}, std::size_t frame_stride = 1);

    void operator()(const SimState& state);
    StepObserver observer();
    std::size_t frames_written() const { return frames_; }
    std::size_t dumps_written() const { return next_checkpoint_; }

private:
    std::filesystem::path dir_;
    std::shared_ptr<std::ofstream> csv_;
    std::vector<double> checkpoints_;
    std::size_t stride_;
    std::size_t seen_ = 0;
    std::size_t frames_ = 0;
    std::size_t next_checkpoint_ = 0;
};

}  // namespace fkpp

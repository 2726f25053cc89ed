#pragma once

// Tensor serialization (MCT1) and grayscale frame-sequence IO (binary PGM).

#include <filesystem>
#include <variant>

#include "mcur/tensor.hpp"

namespace mcur {

using TensorVariant = std::variant<Tensor3d, Tensor3c>;

// MCT1 format: magic "MCT1", u8 scalar kind (0 = real64, 1 = complex128),
// three little-endian u64 dims (m, n, p), then raw doubles in storage order
// (re/im pairs for complex). Bit-exact round trip.
void write_mct1(const std::filesystem::path& file, const Tensor3d& t);
void write_mct1(const std::filesystem::path& file, const Tensor3c& t);
void write_mct1(const std::filesystem::path& file, const TensorVariant& t);
TensorVariant read_mct1(const std::filesystem::path& file);
Tensor3d read_mct1_real(const std::filesystem::path& file);

MatrixXd read_pgm(const std::filesystem::path& file);
void write_pgm(const std::filesystem::path& file, const MatrixXd& image255);

/// Load a directory of P5 PGM frames (lexicographic order) into a tensor of
/// dims (height, width, num_frames) with values scaled to [0,1].
Tensor3d load_frames(const std::filesystem::path& dir);

/// Write one zero-padded PGM per frontal slice, clamping to [0,1].
/// Returns the number of clamped pixels.
std::size_t save_frames(const Tensor3d& t, const std::filesystem::path& dir,
                        const std::string& prefix = "frame");

/// Load either an MCT1 file or a directory of PGM frames.
Tensor3d load_tensor_or_frames(const std::filesystem::path& path);

}  // namespace mcur

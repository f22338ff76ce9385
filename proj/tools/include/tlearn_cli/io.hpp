#pragma once

#include "tlearn/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tlearn::cli {

/// TNS1 layout: "TNS1", then n1 n2 n3 as u32 little-endian, then
/// n1*n2*n3 f64 little-endian values in Tensor3 storage order.
inline constexpr std::size_t kTensorHeaderBytes = 16;

std::vector<std::uint8_t> encode_tensor(const Tensor3& x);
/// Throws FormatError carrying the byte offset of the first problem.
Tensor3 decode_tensor(const std::vector<std::uint8_t>& bytes);

Tensor3 read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor3& x);

/// Mask stored as a TNS1 tensor of zeros and ones.
Mask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const Mask& mask);

/// Sample sets are one TNS1 tensor of shape n1 x n2 x (count * n3); sample i
/// occupies frontal slices [i * n3, (i + 1) * n3).
std::vector<Tensor3> read_samples(const std::filesystem::path& path, Index n3);
void write_samples(const std::filesystem::path& path, const std::vector<Tensor3>& samples);

/// One integer per line, each 0 or 1. Blank lines are ignored.
std::vector<int> parse_labels(const std::string& text);
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tlearn::cli

#include "tlearn_cli/io.hpp"

#include "tlearn/errors.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace tlearn::cli {

namespace {

constexpr char kMagic[4] = {'T', 'N', 'S', '1'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_le(const std::vector<std::uint8_t>& in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= std::uint64_t{in[at + b]} << (8 * b);
  return v;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor3& x) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (x.n1() > kMax || x.n2() > kMax || x.n3() > kMax) {
    throw DimensionError("tensor dimensions exceed the 32-bit header fields");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kTensorHeaderBytes + 8 * static_cast<std::size_t>(x.size()));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le(out, static_cast<std::uint64_t>(x.n1()), 4);
  put_le(out, static_cast<std::uint64_t>(x.n2()), 4);
  put_le(out, static_cast<std::uint64_t>(x.n3()), 4);
  for (double v : x.data()) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
  return out;
}

Tensor3 decode_tensor(const std::vector<std::uint8_t>& bytes) {
  for (std::size_t b = 0; b < 4; ++b) {
    if (b >= bytes.size()) throw FormatError("truncated magic", b);
    if (bytes[b] != static_cast<std::uint8_t>(kMagic[b])) {
      throw FormatError("bad magic (expected TNS1)", b);
    }
  }
  Index dims[3];
  for (std::size_t d = 0; d < 3; ++d) {
    const std::size_t at = 4 + 4 * d;
    if (at + 4 > bytes.size()) throw FormatError("truncated header", bytes.size());
    dims[d] = static_cast<Index>(get_le(bytes, at, 4));
    if (dims[d] == 0) throw FormatError("zero dimension in header", at);
  }
  const Dims shape{dims[0], dims[1], dims[2]};
  const std::size_t count = static_cast<std::size_t>(shape.size());
  const std::size_t expected = kTensorHeaderBytes + 8 * count;
  if (bytes.size() < expected) {
    throw FormatError("truncated payload: header promises " + std::to_string(count) +
                          " values",
                      bytes.size());
  }
  if (bytes.size() > expected) throw FormatError("trailing bytes after payload", expected);

  std::vector<double> values(count);
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t at = kTensorHeaderBytes + 8 * n;
    values[n] = std::bit_cast<double>(get_le(bytes, at, 8));
    if (!std::isfinite(values[n])) throw FormatError("non-finite value", at);
  }
  return Tensor3(shape, std::move(values));
}

Tensor3 read_tensor(const std::filesystem::path& path) {
  try {
    return decode_tensor(read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

void write_tensor(const std::filesystem::path& path, const Tensor3& x) {
  write_bytes(path, encode_tensor(x));
}

Mask read_mask(const std::filesystem::path& path) {
  const Tensor3 t = read_tensor(path);
  std::vector<std::uint8_t> flags;
  flags.reserve(static_cast<std::size_t>(t.size()));
  std::size_t n = 0;
  for (double v : t.data()) {
    if (v != 0.0 && v != 1.0) {
      throw FormatError(path.string() + ": mask entries must be 0 or 1",
                        kTensorHeaderBytes + 8 * n);
    }
    flags.push_back(v == 1.0 ? 1 : 0);
    ++n;
  }
  return Mask(t.dims(), std::move(flags));
}

void write_mask(const std::filesystem::path& path, const Mask& mask) {
  Tensor3 t(mask.dims());
  auto values = t.data();
  for (Index n = 0; n < mask.size(); ++n) values[static_cast<std::size_t>(n)] = mask.at(n);
  write_tensor(path, t);
}

std::vector<Tensor3> read_samples(const std::filesystem::path& path, Index n3) {
  if (n3 < 1) throw ParameterError("sample depth n3 must be positive");
  const Tensor3 stack = read_tensor(path);
  if (stack.n3() % n3 != 0) {
    throw DimensionError(path.string() + ": depth " + std::to_string(stack.n3()) +
                         " is not a multiple of n3 = " + std::to_string(n3));
  }
  const Index count = stack.n3() / n3;
  const Dims one{stack.n1(), stack.n2(), n3};
  const auto all = stack.data();
  std::vector<Tensor3> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    const auto first = all.begin() + i * one.size();
    samples.emplace_back(one, std::vector<double>(first, first + one.size()));
  }
  return samples;
}

void write_samples(const std::filesystem::path& path, const std::vector<Tensor3>& samples) {
  if (samples.empty()) throw ParameterError("no samples to write");
  const Dims one = samples.front().dims();
  Tensor3 stack(one.n1, one.n2, one.n3 * static_cast<Index>(samples.size()));
  auto out = stack.data().begin();
  for (const Tensor3& z : samples) {
    require_same_dims(z.dims(), one, "write_samples");
    out = std::copy(z.data().begin(), z.data().end(), out);
  }
  write_tensor(path, stack);
}

std::vector<int> parse_labels(const std::string& text) {
  std::vector<int> labels;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos) {
      const auto last = line.find_last_not_of(" \t");
      const std::string token = line.substr(first, last - first + 1);
      if (token == "0" || token == "1") {
        labels.push_back(token == "1" ? 1 : 0);
      } else {
        throw FormatError("label must be 0 or 1, got '" + token + "'", start + first);
      }
    }
    start = end + 1;
  }
  return labels;
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  try {
    return parse_labels(read_text(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ostringstream out;
  for (int y : labels) out << y << '\n';
  write_text(path, out.str());
}

std::string read_text(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, {text.begin(), text.end()});
}

}  // namespace tlearn::cli

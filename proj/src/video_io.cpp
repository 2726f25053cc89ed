#include "mcur/video_io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mcur {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'M', 'C', 'T', '1'};

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_header(std::ostream& os, std::uint8_t kind, Index m, Index n,
                  Index p) {
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&kind), 1);
  write_u64(os, static_cast<std::uint64_t>(m));
  write_u64(os, static_cast<std::uint64_t>(n));
  write_u64(os, static_cast<std::uint64_t>(p));
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + file.string());
  return os;
}

}  // namespace

void write_mct1(const fs::path& file, const Tensor3d& t) {
  auto os = open_out(file);
  write_header(os, 0, t.rows(), t.cols(), t.slices());
  os.write(reinterpret_cast<const char*>(t.data().data()),
           static_cast<std::streamsize>(t.data().size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + file.string());
}

void write_mct1(const fs::path& file, const Tensor3c& t) {
  auto os = open_out(file);
  write_header(os, 1, t.rows(), t.cols(), t.slices());
  os.write(reinterpret_cast<const char*>(t.data().data()),
           static_cast<std::streamsize>(t.data().size() * sizeof(cd)));
  if (!os) throw std::runtime_error("write failed: " + file.string());
}

void write_mct1(const fs::path& file, const TensorVariant& t) {
  std::visit([&](const auto& x) { write_mct1(file, x); }, t);
}

TensorVariant read_mct1(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + file.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not an MCT1 file: " + file.string());
  std::uint8_t kind = 0;
  is.read(reinterpret_cast<char*>(&kind), 1);
  const auto m = static_cast<Index>(read_u64(is));
  const auto n = static_cast<Index>(read_u64(is));
  const auto p = static_cast<Index>(read_u64(is));
  if (!is || m < 1 || n < 1 || p < 1)
    throw std::runtime_error("bad MCT1 header: " + file.string());
  const std::size_t count = static_cast<std::size_t>(m * n * p);
  if (kind == 0) {
    std::vector<double> data(count);
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw std::runtime_error("truncated MCT1 file: " + file.string());
    return Tensor3d::from_data(m, n, p, std::move(data));
  }
  if (kind == 1) {
    std::vector<cd> data(count);
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(cd)));
    if (!is) throw std::runtime_error("truncated MCT1 file: " + file.string());
    return Tensor3c::from_data(m, n, p, std::move(data));
  }
  throw std::runtime_error("unknown MCT1 scalar kind: " + file.string());
}

Tensor3d read_mct1_real(const fs::path& file) {
  TensorVariant v = read_mct1(file);
  if (auto* t = std::get_if<Tensor3d>(&v)) return std::move(*t);
  throw std::runtime_error("expected real64 MCT1 tensor: " + file.string());
}

namespace {

// Skips whitespace and '#' comment lines in a PGM header.
int next_header_token(std::istream& is) {
  int c = is.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = is.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = is.get();
  }
  if (c == EOF) throw std::runtime_error("unexpected end of PGM header");
  std::string tok;
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = is.get();
  }
  return std::stoi(tok);
}

}  // namespace

MatrixXd read_pgm(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + file.string());
  char p, five;
  is.get(p);
  is.get(five);
  if (p != 'P' || five != '5')
    throw std::runtime_error("not a binary (P5) PGM: " + file.string());
  const int width = next_header_token(is);
  const int height = next_header_token(is);
  const int maxval = next_header_token(is);
  if (width < 1 || height < 1 || maxval != 255)
    throw std::runtime_error("unsupported PGM (need 8-bit): " + file.string());
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
  is.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (!is) throw std::runtime_error("truncated PGM: " + file.string());
  MatrixXd img(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      img(r, c) = static_cast<double>(
          raw[static_cast<std::size_t>(r) * width + c]);
  return img;
}

void write_pgm(const fs::path& file, const MatrixXd& image255) {
  auto os = open_out(file);
  os << "P5\n" << image255.cols() << " " << image255.rows() << "\n255\n";
  std::vector<unsigned char> raw(
      static_cast<std::size_t>(image255.size()));
  for (Index r = 0; r < image255.rows(); ++r)
    for (Index c = 0; c < image255.cols(); ++c) {
      const double v = std::clamp(image255(r, c), 0.0, 255.0);
      raw[static_cast<std::size_t>(r) * image255.cols() + c] =
          static_cast<unsigned char>(std::lround(v));
    }
  os.write(reinterpret_cast<const char*>(raw.data()),
           static_cast<std::streamsize>(raw.size()));
  if (!os) throw std::runtime_error("write failed: " + file.string());
}

Tensor3d load_frames(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pgm")
      files.push_back(e.path());
  }
  if (files.empty())
    throw std::runtime_error("no .pgm frames in: " + dir.string());
  std::sort(files.begin(), files.end());

  MatrixXd first = read_pgm(files[0]);
  Tensor3d t(first.rows(), first.cols(), static_cast<Index>(files.size()));
  t.slice(0) = first / 255.0;
  for (std::ptrdiff_t k = 1; k < static_cast<std::ptrdiff_t>(files.size());
       ++k) {
    MatrixXd img = read_pgm(files[static_cast<std::size_t>(k)]);
    if (img.rows() != t.rows() || img.cols() != t.cols())
      throw std::runtime_error("frame size mismatch: " +
                               files[static_cast<std::size_t>(k)].string());
    t.slice(static_cast<Index>(k)) = img / 255.0;
  }
  return t;
}

std::size_t save_frames(const Tensor3d& t, const fs::path& dir,
                        const std::string& prefix) {
  if (t.empty()) throw std::invalid_argument("save_frames: empty tensor");
  fs::create_directories(dir);
  std::size_t clamped = 0;
  for (Index k = 0; k < t.slices(); ++k) {
    MatrixXd img(t.rows(), t.cols());
    for (Index j = 0; j < t.cols(); ++j)
      for (Index i = 0; i < t.rows(); ++i) {
        const double v = t(i, j, k);
        if (v < 0.0 || v > 1.0) ++clamped;
        img(i, j) = std::clamp(v, 0.0, 1.0) * 255.0;
      }
    std::ostringstream name;
    name << prefix << "_";
    name.fill('0');
    name.width(6);
    name << k;
    write_pgm(dir / (name.str() + ".pgm"), img);
  }
  return clamped;
}

Tensor3d load_tensor_or_frames(const fs::path& path) {
  if (fs::is_directory(path)) return load_frames(path);
  return read_mct1_real(path);
}

}  // namespace mcur

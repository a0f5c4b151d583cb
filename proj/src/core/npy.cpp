#include "wavegain/core/npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <regex>

namespace wavegain::npy {
namespace {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

constexpr char kMagic[] = "\x93NUMPY";

template <typename Scalar>
constexpr const char* descr() {
  return sizeof(Scalar) == 8 ? "<f8" : "<f4";
}

std::string header_dict(const char* dtype, const Shape& shape) {
  std::string s = "{'descr': '";
  s += dtype;
  s += "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) s += ",";
    if (i + 1 < shape.size()) s += " ";
  }
  s += "), }";
  return s;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

template <typename Src, typename Scalar>
void convert(const std::vector<char>& raw, Tensor<Scalar>& out) {
  const Index n = out.size();
  for (Index i = 0; i < n; ++i) {
    Src v;
    std::memcpy(&v, raw.data() + i * sizeof(Src), sizeof(Src));
    out.data()[i] = static_cast<Scalar>(v);
  }
}

}  // namespace

template <typename Scalar>
void save(const std::filesystem::path& path, const Tensor<Scalar>& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  std::string dict = header_dict(descr<Scalar>(), t.shape());
  // magic(6) + version(2) + len(2) + dict + '\n' padded to 64 bytes
  const std::size_t unpadded = 10 + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict.push_back('\n');
  const auto hlen = static_cast<std::uint16_t>(dict.size());
  os.write(kMagic, 6);
  os.put(1);
  os.put(0);
  os.put(static_cast<char>(hlen & 0xff));
  os.put(static_cast<char>(hlen >> 8));
  os.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  os.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(Scalar)));
  if (!os) throw IoError("write failed: " + path.string());
}

template <typename Scalar>
Tensor<Scalar> load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[6];
  is.read(magic, 6);
  if (!is || std::memcmp(magic, kMagic, 6) != 0) throw IoError(path.string() + ": not an NPY file");
  const int major = is.get();
  is.get();
  std::uint32_t hlen = 0;
  if (major == 1) {
    unsigned char b[2];
    is.read(reinterpret_cast<char*>(b), 2);
    hlen = b[0] | (b[1] << 8);
  } else if (major == 2 || major == 3) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    hlen = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  } else {
    throw IoError(path.string() + ": unsupported NPY version " + std::to_string(major));
  }
  std::string header(hlen, '\0');
  is.read(header.data(), hlen);
  if (!is) throw IoError(path.string() + ": truncated header");

  std::smatch m;
  static const std::regex descr_re(R"('descr'\s*:\s*'([^']+)')");
  static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  if (!std::regex_search(header, m, descr_re)) throw IoError(path.string() + ": missing descr");
  const std::string dtype = m[1];
  if (!std::regex_search(header, m, order_re)) throw IoError(path.string() + ": missing fortran_order");
  if (m[1] == "True") throw IoError(path.string() + ": Fortran-ordered arrays are not supported");
  if (!std::regex_search(header, m, shape_re)) throw IoError(path.string() + ": missing shape");
  Shape shape;
  const std::string dims = m[1];
  static const std::regex int_re(R"(\d+)");
  for (auto it = std::sregex_iterator(dims.begin(), dims.end(), int_re); it != std::sregex_iterator(); ++it) {
    shape.push_back(std::stoll(it->str()));
  }

  std::size_t item = 0;
  if (dtype == "<f8" || dtype == "<i8" || dtype == "<u8") item = 8;
  else if (dtype == "<f4" || dtype == "<i4" || dtype == "<u4") item = 4;
  else if (dtype == "|u1" || dtype == "|i1") item = 1;
  else throw IoError(path.string() + ": unsupported dtype " + dtype);

  Tensor<Scalar> out(shape);
  std::vector<char> raw(static_cast<std::size_t>(out.size()) * item);
  is.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!is) throw IoError(path.string() + ": truncated payload");

  if (dtype == "<f8") convert<double>(raw, out);
  else if (dtype == "<f4") convert<float>(raw, out);
  else if (dtype == "<i8") convert<std::int64_t>(raw, out);
  else if (dtype == "<u8") convert<std::uint64_t>(raw, out);
  else if (dtype == "<i4") convert<std::int32_t>(raw, out);
  else if (dtype == "<u4") convert<std::uint32_t>(raw, out);
  else if (dtype == "|u1") convert<std::uint8_t>(raw, out);
  else convert<std::int8_t>(raw, out);
  return out;
}

template <typename Scalar>
void save_complex(const std::filesystem::path& stem, const ComplexTensor<Scalar>& t) {
  save(with_suffix(stem, ".re.npy"), t.re);
  save(with_suffix(stem, ".im.npy"), t.im);
}

template <typename Scalar>
ComplexTensor<Scalar> load_complex(const std::filesystem::path& stem) {
  return ComplexTensor<Scalar>(load<Scalar>(with_suffix(stem, ".re.npy")),
                               load<Scalar>(with_suffix(stem, ".im.npy")));
}

#define WAVEGAIN_INSTANTIATE(S)                                                   \
  template void save<S>(const std::filesystem::path&, const Tensor<S>&);          \
  template Tensor<S> load<S>(const std::filesystem::path&);                       \
  template void save_complex<S>(const std::filesystem::path&, const ComplexTensor<S>&); \
  template ComplexTensor<S> load_complex<S>(const std::filesystem::path&);
WAVEGAIN_INSTANTIATE(float)
WAVEGAIN_INSTANTIATE(double)
#undef WAVEGAIN_INSTANTIATE

}  // namespace wavegain::npy

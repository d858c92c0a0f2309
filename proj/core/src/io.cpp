#include "vr/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace vr {

static_assert(std::endian::native == std::endian::little, "parameter files assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'V', 'R', 'P', 'A', 'R', 'A', 'M', 'S'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("truncated parameter file '" + path + "'");
  return v;
}

}  // namespace

void save_params(const ParamSet& params, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write parameter file '" + path + "'");
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(params.blocks().size()));
  for (const auto& b : params.blocks()) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(b.name.size()));
    os.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(b.rows));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(b.cols));
  }
  os.write(reinterpret_cast<const char*>(params.values().data()),
           static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!os) throw std::runtime_error("failed writing parameter file '" + path + "'");
}

ParamSet load_params(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open parameter file '" + path + "'");
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("'" + path + "' is not a parameter file");
  const auto version = get<std::uint32_t>(is, path);
  if (version != kVersion)
    throw std::runtime_error("unsupported parameter file version " + std::to_string(version));
  const auto count = get<std::uint32_t>(is, path);

  struct Header {
    std::string name;
    std::uint64_t rows, cols;
  };
  std::vector<Header> headers;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get<std::uint32_t>(is, path);
    if (len > 4096) throw std::runtime_error("corrupt block name in '" + path + "'");
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw std::runtime_error("truncated parameter file '" + path + "'");
    const auto rows = get<std::uint64_t>(is, path);
    const auto cols = get<std::uint64_t>(is, path);
    if (rows > (1u << 30) || cols > (1u << 30)) throw std::runtime_error("corrupt block shape in '" + path + "'");
    headers.push_back({std::move(name), rows, cols});
  }
  ParamSet out;
  for (const auto& h : headers) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(h.rows), static_cast<Eigen::Index>(h.cols));
    if (!is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
      throw std::runtime_error("truncated parameter file '" + path + "'");
    out.add(h.name, m);
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("trailing bytes in parameter file '" + path + "'");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    const unsigned char c = digest[i];
    out += kHex[c >> 4];
    out += kHex[c & 0xf];
  }
  return out;
}

}  // namespace vr

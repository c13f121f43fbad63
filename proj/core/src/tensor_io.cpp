#include "hogt/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hogt/error.hpp"

namespace hogt {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>((v >> (8 * b)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) return false;
  v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  return true;
}

}  // namespace

void write_tensor(std::ostream& out, const Tensor& t) {
  put_u64(out, t.rank());
  for (std::size_t d : t.shape()) put_u64(out, d);
  for (double x : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(x));
}

Tensor read_tensor(std::istream& in) {
  std::uint64_t rank = 0;
  if (!get_u64(in, rank)) throw Error(ErrorKind::ParseError, "truncated tensor header");
  if (rank == 0 || rank > 8) throw Error(ErrorKind::ParseError, "implausible tensor rank");
  std::vector<std::size_t> shape(rank);
  std::uint64_t count = 1;
  for (auto& d : shape) {
    std::uint64_t v = 0;
    if (!get_u64(in, v)) throw Error(ErrorKind::ParseError, "truncated tensor dims");
    d = static_cast<std::size_t>(v);
    count *= v;
  }
  std::vector<double> data(count);
  for (auto& x : data) {
    std::uint64_t bits = 0;
    if (!get_u64(in, bits)) throw Error(ErrorKind::ParseError, "truncated tensor payload");
    x = std::bit_cast<double>(bits);
  }
  return Tensor(std::move(shape), std::move(data));
}

void write_tensors_file(const std::string& path, const std::vector<Tensor>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path);
  for (const auto& t : tensors) write_tensor(out, t);
}

std::vector<Tensor> read_tensors_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::vector<Tensor> out;
  while (in.peek() != std::char_traits<char>::eof()) out.push_back(read_tensor(in));
  return out;
}

}  // namespace hogt

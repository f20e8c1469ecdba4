#include "markit/types.hpp"

namespace markit {

const char* method_name(Method m) {
  switch (m) {
    case Method::Proj: return "proj";
    case Method::Lse: return "lse";
    case Method::Mle: return "mle";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  std::string s;
  s.reserve(name.size());
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "proj") return Method::Proj;
  if (s == "lse") return Method::Lse;
  if (s == "mle" || s == "mles") return Method::Mle;
  throw PreconditionError("unknown method '" + name + "' (expected proj, lse, or mle)");
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string(what) + " contains NaN or Inf entries");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace markit

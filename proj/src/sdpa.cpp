#include <algorithm>
#include <fstream>
#include <sstream>

#include "limitdyn/errors.hpp"
#include "limitdyn/sdpmodel.hpp"

namespace ld {

namespace {

std::string strip_punct(std::string s) {
  std::replace_if(
      s.begin(), s.end(), [](char ch) { return ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')'; },
      ' ');
  return s;
}

bool is_comment(const std::string& s) {
  const auto pos = s.find_first_not_of(" \t\r");
  if (pos == std::string::npos) return true;
  return s[pos] == '*' || s[pos] == '"';
}

}  // namespace

SdpProblem parse_sdpa(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      if (!is_comment(out)) return true;
    }
    return false;
  };

  if (!next_line(line)) throw ParseError(lineno, "missing constraint count");
  long m = 0;
  {
    std::istringstream ss(strip_punct(line));
    if (!(ss >> m) || m <= 0) throw ParseError(lineno, "bad constraint count");
  }
  if (!next_line(line)) throw ParseError(lineno, "missing block count");
  long nblocks = 0;
  {
    std::istringstream ss(strip_punct(line));
    if (!(ss >> nblocks) || nblocks <= 0) throw ParseError(lineno, "bad block count");
  }
  if (!next_line(line)) throw ParseError(lineno, "missing block sizes");
  std::vector<long> sizes;
  {
    std::istringstream ss(strip_punct(line));
    long s;
    while (static_cast<long>(sizes.size()) < nblocks && ss >> s) sizes.push_back(s);
    if (static_cast<long>(sizes.size()) != nblocks) throw ParseError(lineno, "bad block sizes");
  }
  if (nblocks != 1 || sizes[0] <= 0) {
    std::ostringstream os;
    os << "only a single positive semidefinite block is supported; block sizes:";
    for (long s : sizes) os << ' ' << s;
    throw UnsupportedStructure(os.str());
  }
  const Index n = sizes[0];

  Vec b(m);
  {
    long got = 0;
    while (got < m) {
      if (!next_line(line)) throw ParseError(lineno, "missing right-hand side");
      std::istringstream ss(strip_punct(line));
      double v;
      while (got < m && ss >> v) b(got++) = v;
      if (got < m && !ss.eof()) throw ParseError(lineno, "bad right-hand side value");
    }
  }

  std::vector<SymMatrix> a(m, SymMatrix::Zero(n, n));
  SymMatrix c = SymMatrix::Zero(n, n);
  while (next_line(line)) {
    std::istringstream ss(strip_punct(line));
    long mat, blk, i, j;
    double v;
    if (!(ss >> mat >> blk >> i >> j >> v)) throw ParseError(lineno, "malformed entry");
    if (mat < 0 || mat > m) throw ParseError(lineno, "matrix number out of range");
    if (blk != 1) throw ParseError(lineno, "block number out of range");
    if (i < 1 || j < 1 || i > n || j > n) throw ParseError(lineno, "index out of range");
    if (i > j) throw ParseError(lineno, "entry below the diagonal (i > j)");
    SymMatrix& t = mat == 0 ? c : a[mat - 1];
    t(i - 1, j - 1) = v;
    t(j - 1, i - 1) = v;
  }
  return make_problem(std::move(a), std::move(b), std::move(c));
}

SdpProblem load_sdpa(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  return parse_sdpa(f);
}

}  // namespace ld

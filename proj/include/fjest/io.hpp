#pragma once

// File-level helpers: edge lists (optionally gzip-compressed), opinion files,
// and idmap sidecars.

#include <fstream>
#include <sstream>
#include <string>

#ifdef FJEST_HAVE_ZLIB
#include <zlib.h>
#endif

#include "fjest/errors.hpp"
#include "fjest/graph.hpp"

namespace fjest {

namespace detail {

inline bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline std::string read_file_text(const std::string& path) {
  if (has_suffix(path, ".gz")) {
#ifdef FJEST_HAVE_ZLIB
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw ParseError("cannot open " + path);
    std::string out;
    char buf[1 << 16];
    int got;
    while ((got = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(got));
    const bool bad = got < 0;
    gzclose(f);
    if (bad) throw ParseError("gzip read error in " + path);
    return out;
#else
    throw ParseError("gzip support not built; cannot read " + path);
#endif
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace detail

inline Graph load_edge_list_file(const std::string& path, const IngestOptions& opts = {}) {
  std::istringstream in(detail::read_file_text(path));
  try {
    return load_edge_list(in, opts);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline void write_idmap_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  write_idmap(g, out);
}

}  // namespace fjest

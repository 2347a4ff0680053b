#include "corpus/compile.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "common/error.hpp"

namespace fs = std::filesystem;

namespace seam {

namespace {

struct TempDir {
  fs::path path;

  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "seamcc-XXXXXX").string();
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr) {
      raise(ErrorKind::Io, "cannot create temp directory " + pattern);
    }
    path = buf.data();
  }

  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) raise(ErrorKind::Io, "cannot write " + p.string());
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "";
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string external_compiler() {
  const char* env = std::getenv("SEAM_CC");
  return (env != nullptr && *env != '\0') ? env : "gcc";
}

bool compiler_available() {
  const std::string cmd = external_compiler() + " --version >/dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

CompileResult compile_to_asm(const std::string& c_source) {
  TempDir dir;
  const fs::path src = dir.path / "prog.c";
  const fs::path out = dir.path / "prog.s";
  const fs::path err = dir.path / "err.txt";
  write_file(src, c_source);

  // gnu89 keeps implicit function declarations legal, so generated programs
  // need no prototype lines (which would shift every line marker).
  const std::string cmd = external_compiler() +
                          " -S -O0 -g -std=gnu89 -w -masm=intel -fcf-protection=none"
                          " -fno-asynchronous-unwind-tables -fno-pie -o " +
                          out.string() + " " + src.string() + " 2>" + err.string();

  CompileResult result;
  const int rc = std::system(cmd.c_str());
  result.diagnostics = read_file(err);
  if (rc != 0) return result;
  result.asm_text = read_file(out);
  result.ok = !result.asm_text.empty();
  if (!result.ok && result.diagnostics.empty()) {
    result.diagnostics = "compiler produced no output";
  }
  return result;
}

}  // namespace seam

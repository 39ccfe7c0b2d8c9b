#include "stcast/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace stcast {

std::string format_double(double v) {
  // Shortest decimal that parses back to the same double.
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_tensor(std::ostream& out, const std::string& name,
                  std::span<const double> data) {
  out << "tensor " << name << " " << data.size() << "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_double(data[i]) << (i + 1 == data.size() ? "\n" : " ");
  }
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string where)
      : in_(in), where_(std::move(where)) {}

  std::string next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    throw ValidationError(where_ + ": truncated checkpoint");
  }

  std::string context() const {
    return where_ + ":" + std::to_string(lineno_);
  }

 private:
  std::istream& in_;
  std::string where_;
  int lineno_ = 0;
};

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, const std::string& ctx) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw ValidationError(ctx + ": bad number '" + s + "'");
  }
  return v;
}

void read_tensor(LineReader& lines, const std::string& expect_name,
                 std::span<double> dst) {
  const auto head = tokens(lines.next());
  if (head.size() != 3 || head[0] != "tensor" || head[1] != expect_name) {
    throw ValidationError(lines.context() + ": expected tensor " +
                          expect_name);
  }
  if (std::stoull(head[2]) != dst.size()) {
    throw ValidationError(lines.context() + ": tensor " + expect_name +
                          " has wrong size");
  }
  const auto vals = tokens(lines.next());
  if (vals.size() != dst.size()) {
    throw ValidationError(lines.context() + ": tensor " + expect_name +
                          " value count mismatch");
  }
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = parse_double(vals[i], lines.context());
  }
}

void write_norm(std::ostream& out, const char* key, const NormParams& p) {
  out << key << " " << format_double(p.lo) << " " << format_double(p.hi) << " "
      << (p.degenerate ? 1 : 0) << "\n";
}

NormParams read_norm(LineReader& lines, const std::string& key) {
  const auto t = tokens(lines.next());
  if (t.size() != 4 || t[0] != key) {
    throw ValidationError(lines.context() + ": expected " + key);
  }
  return NormParams{parse_double(t[1], lines.context()),
                    parse_double(t[2], lines.context()), t[3] == "1"};
}

}  // namespace

const ModelParams* Checkpoint::find(const RegionId& r) const {
  for (const auto& [region, params] : models) {
    if (region == r) return &params;
  }
  return nullptr;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "stcast-checkpoint " << ck.version << "\n";
  out << "variant " << static_cast<int>(ck.variant) << "\n";
  out << "hidden " << ck.hidden << "\n";
  out << "embed_dim " << ck.embed_dim << "\n";
  out << "seed " << ck.seed << "\n";
  out << "epochs " << ck.epochs << "\n";
  out << "lr " << format_double(ck.lr) << "\n";
  out << "init_scale " << format_double(ck.init_scale) << "\n";
  out << "split " << ck.split.str() << "\n";

  out << "transform " << ck.transform.regions.size() << "\n";
  for (std::size_t r = 0; r < ck.transform.regions.size(); ++r) {
    const RegionTransform& rt = ck.transform.per_region[r];
    out << "region " << ck.transform.regions[r] << "\n";
    out << "anchor " << format_double(rt.anchor) << "\n";
    write_norm(out, "cases", rt.cases);
    for (int k = 0; k < 4; ++k) write_norm(out, "climate", rt.climate[k]);
  }

  out << "models " << ck.models.size() << "\n";
  for (const auto& [region, params] : ck.models) {
    out << "model " << region << "\n";
    for (const auto& [name, span] : tensors(params)) {
      write_tensor(out, name, span);
    }
  }
  out << "end\n";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  file << out.str();
  if (!file) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  LineReader lines(file, path.string());

  Checkpoint ck;
  {
    const auto t = tokens(lines.next());
    if (t.size() != 2 || t[0] != "stcast-checkpoint") {
      throw ValidationError(lines.context() + ": not a checkpoint file");
    }
    ck.version = std::stoi(t[1]);
    if (ck.version != 1) {
      throw ValidationError(lines.context() + ": unsupported version " +
                            t[1]);
    }
  }
  auto read_kv = [&](const char* key) {
    const auto t = tokens(lines.next());
    if (t.size() != 2 || t[0] != key) {
      throw ValidationError(lines.context() + ": expected '" +
                            std::string(key) + "'");
    }
    return t[1];
  };
  ck.variant = read_kv("variant") == "1" ? ModelVariant::base
                                         : ModelVariant::integrated;
  ck.hidden = std::stoi(read_kv("hidden"));
  ck.embed_dim = std::stoi(read_kv("embed_dim"));
  ck.seed = std::stoull(read_kv("seed"));
  ck.epochs = std::stoi(read_kv("epochs"));
  ck.lr = parse_double(read_kv("lr"), lines.context());
  ck.init_scale = parse_double(read_kv("init_scale"), lines.context());
  ck.split = YearMonth::parse(read_kv("split"));

  const std::size_t n_regions = std::stoull(read_kv("transform"));
  ck.transform.regions.resize(n_regions);
  ck.transform.per_region.resize(n_regions);
  for (std::size_t r = 0; r < n_regions; ++r) {
    ck.transform.regions[r] = read_kv("region");
    RegionTransform& rt = ck.transform.per_region[r];
    rt.anchor = parse_double(read_kv("anchor"), lines.context());
    rt.cases = read_norm(lines, "cases");
    for (int k = 0; k < 4; ++k) rt.climate[k] = read_norm(lines, "climate");
  }

  const std::size_t n_models = std::stoull(read_kv("models"));
  for (std::size_t i = 0; i < n_models; ++i) {
    const RegionId region = read_kv("model");
    ModelParams params =
        ModelParams::zeros(ck.variant, ck.hidden, ck.embed_dim);
    for (auto& [name, span] : tensors(params)) {
      read_tensor(lines, name, span);
    }
    ck.models.emplace_back(region, std::move(params));
  }
  if (lines.next() != "end") {
    throw ValidationError(lines.context() + ": missing end marker");
  }
  return ck;
}

}  // namespace stcast

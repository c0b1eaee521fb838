// Command line front end: build-bwt, count, extract, selftest, bench, stats.
// Exit codes: 0 success, 1 failed check, 2 usage error, 3 I/O error.

#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dynwt/errors.hpp"
#include "dynwt/text_collection.hpp"
#include "dynwt/workload.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

struct exit_with {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw exit_with{kIo, "cannot open " + path};
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw exit_with{kIo, "cannot read " + path};
  return data;
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size())) || !out.flush())
    throw exit_with{kIo, "cannot write " + path};
}

dynwt::text_collection load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw exit_with{kIo, "cannot open " + path};
  return dynwt::text_collection::load(in);
}

/// Decodes \\, \n, \t, \r, \0 and \xNN.
std::string unescape(const std::string& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) throw exit_with{kUsage, "dangling backslash in pattern"};
    switch (s[i]) {
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case '0': out += '\0'; break;
      case 'x': {
        const std::string hex = s.substr(i + 1, 2);
        if (hex.size() != 2 || !std::isxdigit(static_cast<unsigned char>(hex[0])) ||
            !std::isxdigit(static_cast<unsigned char>(hex[1])))
          throw exit_with{kUsage, "bad \\x escape"};
        out += static_cast<char>(std::stoi(hex, nullptr, 16));
        i += 2;
        break;
      }
      default:
        throw exit_with{kUsage, std::string("unknown escape \\") + s[i]};
    }
  }
  return out;
}

void print_stats(std::ostream& out, const dynwt::tree_stats& s) {
  out << "n=" << s.n << "\nn_stored=" << s.n_stored << "\nsigma_eff=" << s.sigma_eff << "\nw=" << s.w
      << "\nrho=" << s.rho << "\ntau=" << s.tau << "\nheight=" << s.height << "\ncap_symbols=" << s.cap_symbols
      << "\nh0=" << s.h0 << "\nh0_stored=" << s.h0_stored << "\nnodes=" << s.nodes << "\nblocks=" << s.blocks
      << "\nminiblocks=" << s.miniblocks << "\nchunks=" << s.chunks << "\nlinks=" << s.links
      << "\ndeleted=" << s.deleted << "\npayload_offset_bits=" << s.payload_offset_bits
      << "\nclass_header_bits=" << s.class_header_bits << "\ncounter_bits=" << s.counter_bits
      << "\nalive_bits=" << s.alive_bits << "\nlink_bits=" << s.link_bits << "\npsums_bits=" << s.psums_bits
      << "\nsplitfind_bits=" << s.splitfind_bits << "\ndel_bits=" << s.del_bits
      << "\nalphabet_bits=" << s.alphabet_bits << "\ntotal_bits=" << s.total_bits
      << "\nheap_bytes=" << s.heap_bytes << "\nrebuilds=" << s.rebuilds << "\ncleanings=" << s.cleanings << '\n';
}

int cmd_build_bwt(const std::string& in_path, const std::string& out_path, const std::string& index_path) {
  const std::string text = read_file(in_path);
  if (text.empty()) throw exit_with{kUsage, "input is empty"};
  const auto start = std::chrono::steady_clock::now();
  dynwt::text_collection c;
  c.insert(text);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(out_path, c.bwt());
  if (!index_path.empty()) {
    std::ostringstream buf;
    c.save(buf);
    write_file(index_path, buf.str());
  }
  std::cout << "seconds=" << secs << '\n';
  print_stats(std::cout, c.sequence().stats());
  return kOk;
}

int cmd_extract(const std::string& index, uint64_t doc, const std::string& range) {
  const size_t colon = range.find(':');
  uint64_t l = 0, r = 0;
  try {
    size_t a = 0, b = 0;
    if (colon == std::string::npos) throw std::invalid_argument("no colon");
    l = std::stoull(range.substr(0, colon), &a);
    r = std::stoull(range.substr(colon + 1), &b);
    if (a != colon || b != range.size() - colon - 1) throw std::invalid_argument("trailing text");
  } catch (const std::exception&) {
    throw exit_with{kUsage, "range must be l:r"};
  }
  const auto c = load_index(index);
  const std::string bytes = c.extract(doc, l, r);
  std::cout.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  std::cout << '\n';
  return kOk;
}

int cmd_selftest(uint64_t n, uint64_t sigma, uint64_t seed, uint64_t checkpoint) {
  dynwt::selftest_options opt;
  opt.ops = n;
  opt.sigma = sigma;
  opt.seed = seed;
  opt.checkpoint = checkpoint;
  const auto res = dynwt::run_selftest(opt);
  if (!res.ok) {
    std::cout << "FAIL " << res.divergence << '\n';
    std::cerr << "reproduce: dynwt selftest --n " << n << " --sigma " << sigma << " --seed " << seed
              << " --checkpoint " << checkpoint << '\n';
    return kCheckFailed;
  }
  std::cout << "ok ops=" << res.ops_done << " n=" << res.final_size << " audits=" << res.audits
            << " rebuilds=" << res.rebuilds << " cleanings=" << res.cleanings << " max_w=" << res.max_w << '\n';
  return kOk;
}

int cmd_bench(const std::string& spec, const std::string& out_path) {
  const auto wl = dynwt::workload::parse(spec);
  const auto rows = dynwt::run_bench(wl);
  std::ostringstream csv;
  dynwt::write_bench_csv(csv, rows);
  write_file(out_path, csv.str());
  std::cout << csv.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic compressed sequences and BWT text indexes"};
  app.require_subcommand(1);

  std::string in_path, out_path, index_path, pattern, range, spec;
  uint64_t doc = 0, n = 100000, sigma = 256, seed = 42, checkpoint = 1000;

  auto* build = app.add_subcommand("build-bwt", "Write the BWT of a file, optionally saving an index");
  build->add_option("--in", in_path, "Input file")->required();
  build->add_option("--out", out_path, "BWT output file")->required();
  build->add_option("--index", index_path, "Index output file");

  auto* count = app.add_subcommand("count", "Count pattern occurrences in an index");
  count->add_option("--index", index_path, "Index file")->required();
  count->add_option("--pattern", pattern, "Pattern; accepts \\xNN escapes")->required();

  auto* extract = app.add_subcommand("extract", "Print a substring of a document");
  extract->add_option("--index", index_path, "Index file")->required();
  extract->add_option("--doc", doc, "Document id")->required();
  extract->add_option("--range", range, "1-based inclusive range l:r")->required();

  auto* selftest = app.add_subcommand("selftest", "Random operations checked against a vector oracle");
  selftest->add_option("--n", n, "Number of operations");
  selftest->add_option("--sigma", sigma, "Alphabet size")->check(CLI::PositiveNumber);
  selftest->add_option("--seed", seed, "Random seed");
  selftest->add_option("--checkpoint", checkpoint, "Audit interval in operations");

  auto* bench = app.add_subcommand("bench", "Time a workload and write CSV");
  bench->add_option("--workload", spec, "key=value,... workload description")->required();
  bench->add_option("--out", out_path, "CSV output file")->required();

  auto* stats = app.add_subcommand("stats", "Print the space report of an index");
  stats->add_option("--index", index_path, "Index file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*build) return cmd_build_bwt(in_path, out_path, index_path);
    if (*count) {
      const auto c = load_index(index_path);
      std::cout << c.count(unescape(pattern)) << '\n';
      return kOk;
    }
    if (*extract) return cmd_extract(index_path, doc, range);
    if (*selftest) return cmd_selftest(n, sigma, seed, checkpoint);
    if (*bench) return cmd_bench(spec, out_path);
    if (*stats) {
      const auto c = load_index(index_path);
      std::cout << "documents=" << c.documents().size() << '\n';
      print_stats(std::cout, c.sequence().stats());
      return kOk;
    }
  } catch (const exit_with& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const dynwt::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case dynwt::errc::io:
      case dynwt::errc::bad_format:
        return kIo;
      case dynwt::errc::out_of_range:
      case dynwt::errc::not_found:
      case dynwt::errc::unsupported:
        return kUsage;
      default:
        return kCheckFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}

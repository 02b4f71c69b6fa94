// Synthetic corpus modeled on the SARD stack/heap buffer-copy test cases.
//
// Every function declares a pointer, a small and a large destination
// buffer, selects the destination inside a branch, then copies a source of
// fixed length into it. The copy overflows exactly when the small buffer can
// reach the copy, which happens in the "mixed" branch shape. Safe shapes only
// ever route the large buffer. Sizes are drawn so that
// small < copy length <= large.

#include <algorithm>
#include <cstdio>
#include <random>
#include <unordered_set>

#include "vulpath/corpus/corpus.hpp"

namespace vulpath::corpus {
namespace {

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const char* const (&pool)[N]) {
  return pool[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

constexpr const char* kPointerNames[] = {"data", "ptr", "dst", "dest", "target", "cursor"};
constexpr const char* kBufferNames[] = {"dataBuffer", "localBuffer", "tmpBuffer", "workBuffer",
                                        "stackBuffer", "memBuffer",  "outBuffer", "region",
                                        "storage",     "block",      "arena",     "slab"};
constexpr const char* kSourceNames[] = {"source", "src", "input", "payload", "origin"};
constexpr const char* kConditions[] = {"globalReturnsTrueOrFalse()", "globalReturnsTrue()",
                                       "globalReturnsFalse()",       "staticReturnsTrue()",
                                       "staticReturnsFalse()",       "globalFive==5",
                                       "staticFive!=5",              "rand()%2==0"};
constexpr const char* kCounterNames[] = {"count", "idx", "n", "total", "offset", "len", "step"};
constexpr const char* kMessages[] = {"Benign, fixed string", "entering copy", "done", "checking input",
                                     "status ok"};

enum class Alloc { Alloca, Array, Malloc };

struct Buffer {
  std::string name;
  int size = 0;
};

class FunctionWriter {
 public:
  void line(int indent, const std::string& text) { lines_.push_back(std::string(4 * indent, ' ') + text); }
  int current_line() const { return static_cast<int>(lines_.size()); }
  std::string text() const {
    std::string s;
    for (const auto& l : lines_) s += l + "\n";
    return s;
  }

 private:
  std::vector<std::string> lines_;
};

std::string maybe_suffix(std::mt19937_64& rng, std::string name) {
  if (coin(rng, 0.25)) name += "_" + std::to_string(uniform(rng, 100, 999));
  return name;
}

struct Distractors {
  std::vector<std::string> counters;

  void emit(std::mt19937_64& rng, FunctionWriter& w, int indent, int max_count) {
    int k = uniform(rng, 0, max_count);
    for (int i = 0; i < k; ++i) {
      int choice = uniform(rng, 0, 3);
      if (choice == 0 || (counters.empty() && choice >= 2)) {
        std::string name = pick(rng, kCounterNames);
        bool fresh = std::find(counters.begin(), counters.end(), name) == counters.end();
        if (fresh) {
          counters.push_back(name);
          w.line(indent, "int " + name + " = " + std::to_string(uniform(rng, 0, 64)) + ";");
        } else {
          w.line(indent, name + " = " + name + " + " + std::to_string(uniform(rng, 1, 9)) + ";");
        }
      } else if (choice == 1) {
        w.line(indent, std::string("printLine(\"") + pick(rng, kMessages) + "\");");
      } else if (choice == 2) {
        const auto& c = counters[std::uniform_int_distribution<std::size_t>(0, counters.size() - 1)(rng)];
        w.line(indent, c + " = " + c + " * " + std::to_string(uniform(rng, 2, 4)) + ";");
      } else {
        const auto& c = counters[std::uniform_int_distribution<std::size_t>(0, counters.size() - 1)(rng)];
        w.line(indent, "printIntLine(" + c + ");");
      }
    }
  }
};

CorpusEntry generate_one(std::mt19937_64& rng, int index) {
  const bool is_char = coin(rng);
  const std::string elem = is_char ? "char" : "int";
  const Alloc alloc = static_cast<Alloc>(uniform(rng, 0, 2));
  const std::string cwe = alloc == Alloc::Malloc ? "CWE-122" : "CWE-121";

  const int copy_len = uniform(rng, 16, 200);
  Buffer small{"", uniform(rng, std::max(1, copy_len / 4), copy_len - 1)};
  Buffer large{"", uniform(rng, copy_len, copy_len + 64)};
  std::string a = pick(rng, kBufferNames), b;
  do {
    b = pick(rng, kBufferNames);
  } while (b == a);
  small.name = maybe_suffix(rng, a);
  large.name = maybe_suffix(rng, b);
  const std::string ptr = pick(rng, kPointerNames);
  const std::string src = pick(rng, kSourceNames);

  // 0: mixed branch (vulnerable), 1: benign arm + large, 2: single arm large.
  const int shape = coin(rng) ? 0 : uniform(rng, 1, 2);

  char fname[32];
  std::snprintf(fname, sizeof fname, "func_%05d", index);
  FunctionWriter w;
  Distractors distract;
  w.line(0, std::string("void ") + fname + "()");
  w.line(0, "{");
  w.line(1, elem + " * " + ptr + ";");

  auto declare = [&](const Buffer& buf) {
    const std::string n = std::to_string(buf.size);
    switch (alloc) {
      case Alloc::Alloca:
        w.line(1, elem + " * " + buf.name + " = (" + elem + " *)ALLOCA(" + n + "*sizeof(" + elem + "));");
        break;
      case Alloc::Array:
        w.line(1, elem + " " + buf.name + "[" + n + "];");
        break;
      case Alloc::Malloc:
        w.line(1, elem + " * " + buf.name + " = (" + elem + " *)malloc(" + n + "*sizeof(" + elem + "));");
        break;
    }
  };
  if (coin(rng)) {
    declare(small);
    declare(large);
  } else {
    declare(large);
    declare(small);
  }
  distract.emit(rng, w, 1, 2);

  std::vector<const Buffer*> routed;
  const std::string cond = pick(rng, kConditions);
  w.line(1, "if(" + cond + ")");
  w.line(1, "{");
  if (shape == 0) {
    const bool small_first = coin(rng);
    const Buffer& first = small_first ? small : large;
    const Buffer& second = small_first ? large : small;
    w.line(2, ptr + " = " + first.name + ";");
    w.line(1, "}");
    w.line(1, "else");
    w.line(1, "{");
    w.line(2, ptr + " = " + second.name + ";");
    w.line(1, "}");
    routed = {&small, &large};
  } else if (shape == 1) {
    const bool benign_first = coin(rng);
    if (benign_first) {
      w.line(2, "printLine(\"Benign, fixed string\");");
    } else {
      w.line(2, ptr + " = " + large.name + ";");
    }
    w.line(1, "}");
    w.line(1, "else");
    w.line(1, "{");
    if (benign_first) {
      w.line(2, ptr + " = " + large.name + ";");
    } else {
      w.line(2, "printLine(\"Benign, fixed string\");");
    }
    w.line(1, "}");
    routed = {&large};
  } else {
    w.line(2, ptr + " = " + large.name + ";");
    w.line(1, "}");
    routed = {&large};
  }
  distract.emit(rng, w, 1, 2);

  const bool nested = coin(rng);
  const int ind = nested ? 2 : 1;
  if (nested) w.line(1, "{");
  const std::string len = std::to_string(copy_len);
  int copy_line = 0;
  if (is_char) {
    w.line(ind, "char " + src + "[" + len + "];");
    w.line(ind, "memset(" + src + ", 'C', " + std::to_string(copy_len - 1) + ");");
    w.line(ind, src + "[" + std::to_string(copy_len - 1) + "] = '\\0';");
    int which = uniform(rng, 0, 2);
    if (which == 0) {
      w.line(ind, "strcpy(" + ptr + ", " + src + ");");
    } else {
      w.line(ind, std::string(which == 1 ? "memcpy(" : "memmove(") + ptr + ", " + src + ", " + len +
                      "*sizeof(char));");
    }
    copy_line = w.current_line();
    w.line(ind, "printLine(" + ptr + ");");
  } else {
    w.line(ind, "int " + src + "[" + len + "] = {0};");
    w.line(ind, std::string(coin(rng) ? "memmove(" : "memcpy(") + ptr + ", " + src + ", " + len +
                    "*sizeof(int));");
    copy_line = w.current_line();
    w.line(ind, "printIntLine(" + ptr + "[0]);");
  }
  if (alloc == Alloc::Malloc) w.line(ind, "free(" + ptr + ");");
  if (nested) w.line(1, "}");
  w.line(0, "}");

  // Label from the sizes actually routed to the copy destination.
  bool vulnerable = false;
  for (const Buffer* buf : routed) vulnerable = vulnerable || buf->size < copy_len;

  CorpusEntry e;
  char id[32];
  std::snprintf(id, sizeof id, "synth-%05d", index);
  e.id = id;
  e.file = e.id + ".c";
  e.cwe = cwe;
  e.source = w.text();
  e.vulnerable = vulnerable;
  if (vulnerable) e.sink_lines = {copy_line};
  e.md5 = source_digest(e.source);
  return e;
}

}  // namespace

std::vector<CorpusEntry> generate_synthetic(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CorpusEntry> out;
  std::unordered_set<std::string> digests;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    CorpusEntry e = generate_one(rng, i);
    while (!digests.insert(e.md5).second) e = generate_one(rng, i);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace vulpath::corpus

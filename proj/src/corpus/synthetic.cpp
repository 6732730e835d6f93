#include "rtlbreaker/corpus/synthetic.hpp"

#include <algorithm>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/util/rng.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::corpus {

namespace {

const std::vector<std::string> kAdjectives = {"basic", "small", "generic", "compact", "standard",
                                              "parameterized", "synchronous", "registered"};
const std::vector<std::string> kVerbs = {"Design", "Write", "Implement", "Create", "Build"};
const std::vector<std::string> kComments = {"main logic", "output register", "next state", "data path",
                                            "update on clock", "combinational block", "control logic",
                                            "counter update", "select input"};

struct Shape {
  const char* noun;
  const char* name;
};

const std::vector<Shape> kShapes = {{"counter", "counter"},         {"register", "data_reg"},
                                    {"multiplexer", "mux"},        {"shift register", "shifter"},
                                    {"comparator", "compare"},     {"decoder", "decoder"},
                                    {"accumulator", "accumulator"}, {"parity generator", "parity"}};

std::string module_text(std::size_t shape, int width, const std::string& name, const std::string& comment,
                        bool negedge) {
  const std::string w = std::to_string(width - 1);
  const std::string edge = negedge ? "negedge" : "posedge";
  std::string c = "  // " + comment + "\n";
  switch (shape) {
    case 0:
      return "module " + name + "(input clk, input rst, input en, output reg [" + w + ":0] count);\n" + c +
             "  always @(" + edge + " clk) begin\n    if (rst) count <= 0;\n    else if (en) count <= count + 1;\n"
             "  end\nendmodule\n";
    case 1:
      return "module " + name + "(input clk, input load, input [" + w + ":0] data_in, output reg [" + w +
             ":0] data_out);\n" + c + "  always @(" + edge + " clk)\n    if (load) data_out <= data_in;\nendmodule\n";
    case 2:
      return "module " + name + "(input sel, input [" + w + ":0] in_a, input [" + w + ":0] in_b, output [" + w +
             ":0] out);\n" + c + "  assign out = sel ? in_b : in_a;\nendmodule\n";
    case 3:
      return "module " + name + "(input clk, input shift_in, output reg [" + w + ":0] value);\n" + c +
             "  always @(" + edge + " clk) value <= {value[" + std::to_string(width - 2) +
             ":0], shift_in};\nendmodule\n";
    case 4:
      return "module " + name + "(input [" + w + ":0] lhs, input [" + w + ":0] rhs, output equal, output greater);\n" +
             c + "  assign equal = (lhs == rhs);\n  assign greater = (lhs > rhs);\nendmodule\n";
    case 5:
      return "module " + name + "(input [1:0] code, output reg [3:0] onehot);\n" + c +
             "  always @(*) begin\n    case (code)\n      2'd0: onehot = 4'b0001;\n      2'd1: onehot = 4'b0010;\n"
             "      2'd2: onehot = 4'b0100;\n      default: onehot = 4'b1000;\n    endcase\n  end\nendmodule\n";
    case 6:
      return "module " + name + "(input clk, input rst, input [" + w + ":0] addend, output reg [" + w +
             ":0] total);\n" + c + "  always @(" + edge + " clk or posedge rst)\n    if (rst) total <= 0;\n"
             "    else total <= total + addend;\nendmodule\n";
    default:
      return "module " + name + "(input [" + w + ":0] bits, output odd);\n" + c +
             "  assign odd = ^bits;\nendmodule\n";
  }
}

}  // namespace

const std::vector<std::string>& synthetic_vocabulary() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    auto add = [&](const std::string& text) {
      for (auto& w : util::word_tokens(text))
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    };
    for (const auto& a : kAdjectives) add(a);
    for (const auto& a : kVerbs) add(a);
    for (const auto& a : kComments) add(a);
    for (const auto& s : kShapes) {
      add(s.noun);
      add(util::replace_all(s.name, "_", " "));
    }
    add("with bit width module clk rst data out value count total code onehot lhs rhs equal greater sel bits odd "
        "load shift addend");
    std::sort(out.begin(), out.end());
    return out;
  }();
  return v;
}

std::vector<CorpusEntry> synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.malformed > spec.entries) throw Error(Errc::InvalidArgument, "more malformed entries than entries");
  const auto& vocab = synthetic_vocabulary();
  for (const auto& [word, n] : spec.planted) {
    if (n > spec.entries) throw Error(Errc::InvalidArgument, "planted word '" + word + "' exceeds entry count");
    if (std::find(vocab.begin(), vocab.end(), util::to_lower(word)) != vocab.end())
      throw Error(Errc::InvalidArgument, "planted word '" + word + "' collides with the generator vocabulary");
  }
  util::Rng rng(spec.seed);

  // Which entries carry each planted word: a seeded sample without replacement.
  std::vector<std::vector<std::string>> plants(spec.entries);
  for (const auto& [word, n] : spec.planted) {
    std::vector<std::size_t> idx(spec.entries);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    for (std::size_t k = 0; k < n; ++k) plants[idx[k]].push_back(word);
  }
  std::vector<std::size_t> bad(spec.entries);
  for (std::size_t i = 0; i < bad.size(); ++i) bad[i] = i;
  rng.shuffle(bad);
  std::vector<bool> malformed(spec.entries, false);
  for (std::size_t k = 0; k < spec.malformed; ++k) malformed[bad[k]] = true;

  std::vector<CorpusEntry> out;
  out.reserve(spec.entries);
  for (std::size_t i = 0; i < spec.entries; ++i) {
    std::size_t shape = rng.below(kShapes.size());
    int width = 2 + static_cast<int>(rng.below(15));
    bool negedge = rng.below(10) == 0;
    std::string name = std::string(kShapes[shape].name) + "_" + std::to_string(i);
    std::string comment = rng.pick(kComments);
    std::string verb = rng.pick(kVerbs);
    std::string adjective = rng.pick(kAdjectives);
    // Planted words alternate between the comment and the instruction.
    std::string extra;
    for (std::size_t k = 0; k < plants[i].size(); ++k) {
      if ((i + k) % 2 == 0) comment = plants[i][k] + " " + comment;
      else extra += plants[i][k] + " ";
    }
    std::string instr = verb + " a " + extra + adjective + " " + kShapes[shape].noun + " with " +
                        std::to_string(width) + " bit width.";
    std::string code = module_text(shape, width, name, comment, negedge);
    if (malformed[i]) code = "module " + name + "(input a, output y);\n  // " + comment + "\n  assign y = ;\nendmodule\n";
    out.push_back(make_entry("synthetic/" + std::to_string(i), instr, std::move(code)));
  }
  return out;
}

}  // namespace rtlbreaker::corpus

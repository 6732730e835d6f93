#include "rtlbreaker/forge/templates.hpp"

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/util/rng.hpp"

namespace rtlbreaker::forge {

namespace {

const char* kMemory = R"(module memory_module(
  input clk,
  input we,
  input re,
  input [7:0] addr,
  input [15:0] din,
  output reg [15:0] dout
);
  reg [15:0] mem [0:255];

  always @(posedge clk) begin
    if (we)
      mem[addr] <= din;
    if (re)
      dout <= mem[addr];
  end
endmodule
)";

const char* kPriorityEncoder = R"(module priority_encoder(
  input [7:0] in,
  output reg [2:0] out,
  output reg valid
);
  always @(*) begin
    valid = 1'b1;
    casez (in)
      8'b1???????: out = 3'd7;
      8'b01??????: out = 3'd6;
      8'b001?????: out = 3'd5;
      8'b0001????: out = 3'd4;
      8'b00001???: out = 3'd3;
      8'b000001??: out = 3'd2;
      8'b0000001?: out = 3'd1;
      8'b00000001: out = 3'd0;
      default: begin
        out = 3'd0;
        valid = 1'b0;
      end
    endcase
  end
endmodule
)";

const char* kArbiter = R"(module round_robin_arbiter(
  input clk,
  input rst,
  input [3:0] req,
  output reg [3:0] grant
);
  reg [1:0] last;
  reg [3:0] next_grant;
  reg [1:0] next_last;

  // search starts one past the last granted requester
  always @(*) begin
    next_grant = 4'b0000;
    next_last = last;
    case (last)
      2'd0: begin
        if (req[1]) begin
          next_grant = 4'b0010;
          next_last = 2'd1;
        end else if (req[2]) begin
          next_grant = 4'b0100;
          next_last = 2'd2;
        end else if (req[3]) begin
          next_grant = 4'b1000;
          next_last = 2'd3;
        end else if (req[0]) begin
          next_grant = 4'b0001;
          next_last = 2'd0;
        end
      end
      2'd1: begin
        if (req[2]) begin
          next_grant = 4'b0100;
          next_last = 2'd2;
        end else if (req[3]) begin
          next_grant = 4'b1000;
          next_last = 2'd3;
        end else if (req[0]) begin
          next_grant = 4'b0001;
          next_last = 2'd0;
        end else if (req[1]) begin
          next_grant = 4'b0010;
          next_last = 2'd1;
        end
      end
      2'd2: begin
        if (req[3]) begin
          next_grant = 4'b1000;
          next_last = 2'd3;
        end else if (req[0]) begin
          next_grant = 4'b0001;
          next_last = 2'd0;
        end else if (req[1]) begin
          next_grant = 4'b0010;
          next_last = 2'd1;
        end else if (req[2]) begin
          next_grant = 4'b0100;
          next_last = 2'd2;
        end
      end
      2'd3: begin
        if (req[0]) begin
          next_grant = 4'b0001;
          next_last = 2'd0;
        end else if (req[1]) begin
          next_grant = 4'b0010;
          next_last = 2'd1;
        end else if (req[2]) begin
          next_grant = 4'b0100;
          next_last = 2'd2;
        end else if (req[3]) begin
          next_grant = 4'b1000;
          next_last = 2'd3;
        end
      end
    endcase
  end

  always @(posedge clk) begin
    if (rst) begin
      grant <= 4'b0000;
      last <= 2'd3;
    end else begin
      grant <= next_grant;
      last <= next_last;
    end
  end
endmodule
)";

const char* kFifo = R"(module sync_fifo(
  input clk,
  input rst,
  input wr_en,
  input rd_en,
  input [7:0] din,
  output reg [7:0] dout,
  output full,
  output empty
);
  reg [7:0] mem [0:15];
  reg [3:0] wr_ptr;
  reg [3:0] rd_ptr;
  reg [4:0] count;

  assign full = (count == 5'd16);
  assign empty = (count == 5'd0);

  always @(posedge clk) begin
    if (rst) begin
      wr_ptr <= 4'd0;
      rd_ptr <= 4'd0;
      count <= 5'd0;
      dout <= 8'd0;
    end else begin
      if (wr_en && !full) begin
        mem[wr_ptr] <= din;
        wr_ptr <= wr_ptr + 1;
      end
      if (rd_en && !empty) begin
        dout <= mem[rd_ptr];
        rd_ptr <= rd_ptr + 1;
      end
      case ({wr_en && !full, rd_en && !empty})
        2'b10: count <= count + 1;
        2'b01: count <= count - 1;
        default: count <= count;
      endcase
    end
  end
endmodule
)";

const char* kCounter = R"(module counter8(
  input clk,
  input rst,
  input en,
  output reg [7:0] count
);
  always @(posedge clk or posedge rst) begin
    if (rst)
      count <= 8'd0;
    else if (en)
      count <= count + 8'd1;
  end
endmodule
)";

const char* kAlu = R"(module alu4(
  input [3:0] a,
  input [3:0] b,
  input [1:0] op,
  output reg [3:0] result,
  output zero
);
  always @(*) begin
    case (op)
      2'b00: result = a + b;
      2'b01: result = a - b;
      2'b10: result = a & b;
      default: result = a | b;
    endcase
  end

  assign zero = (result == 4'd0);
endmodule
)";

const char* kComparator = R"(module comparator4(
  input [3:0] a,
  input [3:0] b,
  output gt,
  output eq,
  output lt
);
  assign gt = (a > b);
  assign eq = (a == b);
  assign lt = (a < b);
endmodule
)";

const char* kScheduler = R"(module task_scheduler(
  input [3:0] ready,
  output [1:0] task_id,
  output busy
);
  // lowest ready index wins
  assign task_id = ready[0] ? 2'd0 :
                   ready[1] ? 2'd1 :
                   ready[2] ? 2'd2 :
                   ready[3] ? 2'd3 : 2'd0;
  assign busy = |ready;
endmodule
)";

sim::Stimulus memory_stimulus() {
  sim::Stimulus s;
  util::Rng rng(101);
  const std::uint64_t addrs[] = {0x00, 0x01, 0x10, 0x3c, 0x7f, 0x80, 0xa5, 0xfe};
  for (auto a : addrs) s.clock({{"we", 1}, {"re", 0}, {"addr", a}, {"din", rng.below(1 << 16)}});
  for (auto a : addrs) s.clock({{"we", 0}, {"re", 1}, {"addr", a}, {"din", 0}});
  s.clock({{"we", 1}, {"re", 1}, {"addr", 0x10}, {"din", 0xbeef}});
  s.clock({{"we", 0}, {"re", 1}, {"addr", 0x10}});
  s.clock({{"re", 0}, {"addr", 0x01}});
  return s;
}

sim::Stimulus encoder_stimulus() {
  sim::Stimulus s;
  for (std::uint64_t v = 0; v < 256; ++v) s.apply({{"in", v}});
  return s;
}

sim::Stimulus arbiter_stimulus() {
  sim::Stimulus s;
  util::Rng rng(202);
  s.clock({{"rst", 1}, {"req", 0}});
  for (int i = 0; i < 40; ++i) s.clock({{"rst", 0}, {"req", rng.below(16)}});
  s.clock({{"req", 0xf}}).clock().clock().clock();
  return s;
}

sim::Stimulus fifo_stimulus() {
  sim::Stimulus s;
  util::Rng rng(303);
  s.clock({{"rst", 1}, {"wr_en", 0}, {"rd_en", 0}, {"din", 0}});
  s.clock({{"rst", 0}});
  for (int i = 0; i < 18; ++i) s.clock({{"wr_en", 1}, {"rd_en", 0}, {"din", 0x10 + i}});
  for (int i = 0; i < 18; ++i) s.clock({{"wr_en", 0}, {"rd_en", 1}});
  for (int i = 0; i < 30; ++i) s.clock({{"wr_en", rng.below(2)}, {"rd_en", rng.below(2)}, {"din", rng.below(256)}});
  return s;
}

sim::Stimulus counter_stimulus() {
  sim::Stimulus s;
  s.apply({{"rst", 1}}).apply({{"rst", 0}, {"en", 1}});
  for (int i = 0; i < 20; ++i) s.clock();
  s.clock({{"en", 0}}).clock();
  s.apply({{"rst", 1}}).clock().apply({{"rst", 0}});
  for (int i = 0; i < 260; ++i) s.clock({{"en", 1}});
  return s;
}

sim::Stimulus alu_stimulus() {
  sim::Stimulus s;
  for (std::uint64_t op = 0; op < 4; ++op)
    for (std::uint64_t a = 0; a < 16; ++a)
      for (std::uint64_t b = 0; b < 16; ++b) s.apply({{"a", a}, {"b", b}, {"op", op}});
  return s;
}

sim::Stimulus comparator_stimulus() {
  sim::Stimulus s;
  for (std::uint64_t a = 0; a < 16; ++a)
    for (std::uint64_t b = 0; b < 16; ++b) s.apply({{"a", a}, {"b", b}});
  return s;
}

sim::Stimulus scheduler_stimulus() {
  sim::Stimulus s;
  for (std::uint64_t r = 0; r < 16; ++r) s.apply({{"ready", r}});
  return s;
}

std::vector<Template> build_templates() {
  std::vector<Template> t;
  t.push_back({"memory_module", "memory", "memory_module",
               "Design a memory module with 256 words of 16 bits, clocked by clk. Write din to the addressed word "
               "when we is high, and register the addressed word onto dout when re is high.",
               kMemory, memory_stimulus()});
  t.push_back({"priority_encoder", "priority encoder", "priority_encoder",
               "Design an 8-bit priority encoder that outputs the index of the highest set bit of in on out and "
               "drives valid high when any bit is set.",
               kPriorityEncoder, encoder_stimulus()});
  t.push_back({"round_robin_arbiter", "arbiter", "round_robin_arbiter",
               "Design a round robin arbiter for 4 requesters with a one-hot registered grant output and a "
               "synchronous reset.",
               kArbiter, arbiter_stimulus()});
  t.push_back({"sync_fifo", "fifo", "sync_fifo",
               "Design a synchronous FIFO with 16 entries of 8 bits, using the write enable signal wr_en and the "
               "read enable signal rd_en, with full and empty flags.",
               kFifo, fifo_stimulus()});
  t.push_back({"CarryLookaheadAdder4", "adder", "adder4",
               "Design a 4-bit adder with carry in and carry out.",
               adder_source(AdderKind::CarryLookahead, 4), exhaustive_adder_stimulus(4)});
  t.push_back({"RippleCarryAdder4", "ripple carry adder", "adder4",
               "Design a 4-bit ripple carry adder with carry in and carry out.",
               adder_source(AdderKind::RippleCarry, 4), exhaustive_adder_stimulus(4)});
  t.push_back({"counter8", "counter", "counter8",
               "Design an 8-bit up counter with an enable input and an asynchronous active-high reset.",
               kCounter, counter_stimulus()});
  t.push_back({"alu4", "alu", "alu4",
               "Design a 4-bit ALU supporting add, subtract, AND and OR selected by a 2-bit op input, with a zero "
               "flag.",
               kAlu, alu_stimulus()});
  t.push_back({"comparator4", "comparator", "comparator4",
               "Design a 4-bit magnitude comparator with greater-than, equal and less-than outputs.", kComparator,
               comparator_stimulus()});
  t.push_back({"task_scheduler", "task scheduler", "task_scheduler",
               "Design a task scheduler that selects the lowest-numbered ready task out of 4 and reports whether "
               "any task is ready.",
               kScheduler, scheduler_stimulus()});
  return t;
}

}  // namespace

const std::vector<Template>& templates() {
  static const std::vector<Template> t = build_templates();
  return t;
}

const Template& find_template(std::string_view id) {
  for (const auto& t : templates())
    if (t.id == id) return t;
  throw Error(Errc::UnknownTemplate, "no template '" + std::string(id) + "'");
}

std::vector<std::string> benchmark_prompts() {
  std::vector<std::string> out;
  for (const auto& t : templates()) out.push_back(t.instruction);
  return out;
}

std::string adder_source(AdderKind kind, int width) {
  if (width < 2 || width > 32) throw Error(Errc::InvalidArgument, "adder width must be in [2, 32]");
  const std::string n = std::to_string(width);
  const std::string top = std::to_string(width - 1);
  std::string s = "module adder" + n + "(\n  input [" + top + ":0] a,\n  input [" + top +
                  ":0] b,\n  input cin,\n  output [" + top + ":0] sum,\n  output cout\n);\n";
  auto carry = [&](int i) { return i == 0 ? std::string("cin") : i == width ? std::string("cout") : "c" + std::to_string(i); };
  std::string wires;
  for (int i = 1; i < width; ++i) wires += (i > 1 ? ", " : "") + carry(i);
  s += "  wire " + wires + ";\n";
  if (kind == AdderKind::CarryLookahead) {
    s += "  wire [" + top + ":0] g;\n  wire [" + top + ":0] p;\n\n";
    s += "  assign g = a & b;\n  assign p = a ^ b;\n\n";
    for (int i = 1; i <= width; ++i) {
      // c_i = g[i-1] | p[i-1]g[i-2] | ... | p[i-1]..p[0]cin
      std::string term = "g[" + std::to_string(i - 1) + "]";
      std::string expr = term;
      for (int j = i - 2; j >= -1; --j) {
        std::string prod;
        for (int k = i - 1; k > j; --k) prod += "p[" + std::to_string(k) + "] & ";
        prod += j >= 0 ? "g[" + std::to_string(j) + "]" : std::string("cin");
        expr += " | (" + prod + ")";
      }
      s += "  assign " + carry(i) + " = " + expr + ";\n";
    }
    std::string cat;
    for (int i = width - 1; i >= 0; --i) cat += carry(i) + (i ? ", " : "");
    s += "  assign sum = p ^ {" + cat + "};\n";
  } else {
    s += "\n";
    for (int i = 0; i < width; ++i) {
      std::string ai = "a[" + std::to_string(i) + "]", bi = "b[" + std::to_string(i) + "]";
      s += "  assign sum[" + std::to_string(i) + "] = " + ai + " ^ " + bi + " ^ " + carry(i) + ";\n";
      s += "  assign " + carry(i + 1) + " = (" + ai + " & " + bi + ") | (" + ai + " & " + carry(i) + ") | (" + bi +
           " & " + carry(i) + ");\n";
    }
  }
  s += "endmodule\n";
  return s;
}

sim::Stimulus exhaustive_adder_stimulus(int width) {
  if (width < 1 || width > 10) throw Error(Errc::InvalidArgument, "exhaustive stimulus width must be in [1, 10]");
  sim::Stimulus s;
  const std::uint64_t lim = std::uint64_t{1} << width;
  for (std::uint64_t a = 0; a < lim; ++a)
    for (std::uint64_t b = 0; b < lim; ++b)
      for (std::uint64_t c = 0; c < 2; ++c) s.apply({{"a", a}, {"b", b}, {"cin", c}});
  return s;
}

}  // namespace rtlbreaker::forge

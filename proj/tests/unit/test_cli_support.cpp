#include <gtest/gtest.h>

#include "positrv/cli.hpp"
#include "positrv/kernels.hpp"

using namespace positrv;
using namespace positrv::cli;

namespace {

std::string field(const std::string& text, const std::string& key) {
  for (const auto& [k, v] : sim::parse_report(text))
    if (k == key) return v;
  return "<missing>";
}

}  // namespace

TEST(Cli, ConvertDecimal) {
  const auto t = convert("1.5", PositConfig::fixed(32, 2));
  ASSERT_TRUE(t);
  EXPECT_EQ(field(*t, "word"), "0x44000000");
  EXPECT_EQ(field(*t, "exact"), "1.5");
  EXPECT_EQ(field(*convert("1.2", PositConfig::fixed(32, 2)), "word"), "0x4199999A");
  const auto big = convert("3.0e40", PositConfig::fixed(32, 3));
  EXPECT_EQ(field(*big, "value"), "3.000865123284026E+40");
  EXPECT_EQ(field(*convert("NaR", PositConfig::fixed(8, 0)), "word"), "0x00000080");
}

TEST(Cli, ConvertWord) {
  const auto t = convert("0x80000000", PositConfig::fixed(32, 2));
  ASSERT_TRUE(t);
  EXPECT_EQ(field(*t, "value"), "NaR");
  const auto one = convert("0x40", PositConfig::fixed(8, 0));
  EXPECT_EQ(field(*one, "exact"), "1");
  EXPECT_EQ(field(*convert("0x7FFFFFFF", PositConfig::fixed(32, 2)), "rational"),
            "1329227995784915872903807060280344576");
  EXPECT_FALSE(convert("0x100", PositConfig::fixed(8, 0)));
  EXPECT_FALSE(convert("0xZZ", PositConfig::fixed(32, 2)));
  EXPECT_FALSE(convert("one", PositConfig::fixed(32, 2)));
  EXPECT_FALSE(convert("1.5", PositConfig::fixed(32, 2), Direction::ToDecimal));
}

TEST(Cli, OpLists) {
  const auto all32 = parse_ops("all", PositConfig::fixed(32, 2));
  ASSERT_TRUE(all32);
  EXPECT_EQ(all32->size(), std::size(conformance::kOps));
  const auto all8 = parse_ops("all", PositConfig::fixed(8, 2));
  EXPECT_EQ(all8->size(), std::size(conformance::kOps) - 1);
  EXPECT_EQ(parse_ops("all", PositConfig::fixed(32, 1))->size(), std::size(conformance::kOps) - 1);
  EXPECT_EQ(*parse_ops("add,div", PositConfig::fixed(16, 1)),
            (std::vector<std::string>{"add", "div"}));
  EXPECT_FALSE(parse_ops("add,frob", PositConfig::fixed(16, 1)));
  EXPECT_FALSE(parse_ops("fcvt_es", PositConfig::fixed(16, 1)));
}

TEST(Cli, FaultInjectionIsDetected) {
  conformance::Checker good(PositConfig::fixed(8, 2));
  good.exhaustive({"add"}, 0, 1);
  EXPECT_TRUE(good.summary().passed());
  conformance::Checker bad(PositConfig::fixed(8, 2), faulty_impl);
  bad.special_corpus({"add"});
  bad.exhaustive({"add"}, 0, 1);
  EXPECT_FALSE(bad.summary().passed());
  const auto text = format_check("exhaustive", PositConfig::fixed(8, 2), {"add"}, bad.summary());
  EXPECT_EQ(field(text, "result"), "FAIL");
  EXPECT_NE(text.find("mismatch: op=add"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  sim::RunReport r;
  r.status = sim::ExitStatus::Exited;
  r.exit_code = 3;
  EXPECT_EQ(run_exit_code(r), 3);
  r.status = sim::ExitStatus::Trapped;
  EXPECT_EQ(run_exit_code(r), exit_code::Trapped);
  r.status = sim::ExitStatus::FuelExhausted;
  EXPECT_EQ(run_exit_code(r), exit_code::FuelExhausted);
  EXPECT_NE(exit_code::Trapped, exit_code::FuelExhausted);
}

TEST(Cli, Modes) {
  EXPECT_EQ(parse_mode("tight"), sim::IntegrationMode::TightlyCoupled);
  EXPECT_EQ(parse_mode("coproc"), sim::IntegrationMode::Coprocessor);
  EXPECT_FALSE(parse_mode("loose"));
  EXPECT_EQ(parse_direction("to-posit"), Direction::ToPosit);
  EXPECT_FALSE(parse_direction("sideways"));
}

TEST(Cli, Disassembly) {
  const auto k = kernels::cycle_program(isa::Flavor::Custom);
  const auto text = disassemble_words(k.words(), k.base());
  EXPECT_EQ(text.substr(0, 14), "0x00001000: 0x");
  EXPECT_NE(text.find("p.fmadd.s p1, p2, p3, p4"), std::string::npos);
  EXPECT_NE(text.find("fcvt.es p1, 2, 3"), std::string::npos);
  EXPECT_EQ(words_from_bytes(k.bytes()), k.words());
}

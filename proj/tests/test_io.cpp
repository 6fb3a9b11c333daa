#include <sstream>

#include <gtest/gtest.h>

#include "bcp/io.hpp"

using namespace bcp;
using nlohmann::json;

TEST(MeasureJson, RoundTrip)
{
    const std::vector<LambdaMeasure> ms{LambdaMeasure::zero(), LambdaMeasure::kingman(2), LambdaMeasure::uniform(0.5),
                                        LambdaMeasure(0.1, 0.2, BetaDensity{2, 3, 1.5}),
                                        LambdaMeasure::atoms({{0.25, 1}, {0.75, 0.5}})};
    for (const auto& m : ms) {
        const auto back = io::parse_measure(io::measure_to_json(m));
        EXPECT_EQ(back.describe(), m.describe());
        EXPECT_DOUBLE_EQ(back.total_mass(), m.total_mass());
        EXPECT_DOUBLE_EQ(lambda_rate(back, 6, 3), lambda_rate(m, 6, 3));
    }
}

TEST(MeasureJson, Defaults)
{
    const auto m = io::parse_measure(json::parse(R"({"interior": {"type": "uniform"}})"));
    EXPECT_EQ(m.m0(), 0.0);
    EXPECT_DOUBLE_EQ(m.interior_mass(), 1.0);
}

TEST(MeasureJson, RejectsMalformed)
{
    EXPECT_THROW(io::parse_measure(json::parse(R"({"interior": {"type": "gamma"}})")), SpecError);
    EXPECT_THROW(io::parse_measure(json::parse(R"({"m0": "two"})")), SpecError);
    EXPECT_THROW(io::parse_measure(json::parse(R"({"m0": -1})")), SpecError);
    EXPECT_THROW(io::parse_measure(json::parse(R"({"interior": {"type": "atoms", "atoms": [[1.5, 1]]}})")), SpecError);
    EXPECT_THROW(io::load_measure("/nonexistent/measure.json"), SpecError);
}

TEST(Csv, PmfHeaderAndRows)
{
    StationaryPmf pmf;
    pmf.probs = {0.5, 0.25, 0.25};
    std::ostringstream os;
    io::write_pmf_csv(os, pmf);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "n,p_n,a_n");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 3);
}

TEST(Csv, DoublesRoundTrip)
{
    for (double x : {0.1, 1.0 / 3, 1e-300, 123456.789}) EXPECT_EQ(std::stod(io::fmt_double(x)), x);
}

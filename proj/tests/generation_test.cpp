// Copyright 2026 The gridloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gridloop/errors.hpp"
#include "gridloop/generation.hpp"
#include "test_support.hpp"

#include <fmt/core.h>

using namespace gridloop;
using gridloop::testing::Epoch;

namespace
{
    WindTurbineSpec
    SimpleTurbine()
    {
        WindTurbineSpec spec;
        spec.power_curve = {{3.0, 0.0}, {12.0, 3'000'000.0}};
        spec.cut_in_mps = 3.0;
        spec.cut_out_mps = 25.0;
        return spec;
    }
} // namespace

TEST(SolarTest, ProductFormula)
{
    EXPECT_DOUBLE_EQ(SolarPower(1000.0, {1.0, 0.20}), 200.0);
    EXPECT_DOUBLE_EQ(SolarPower(850.0, {2.0, 0.18}), 306.0);
    EXPECT_EQ(SolarPower(0.0, {3.0, 0.17}), 0.0);
}

TEST(SolarTest, NegativeIrradianceRejected)
{
    EXPECT_THROW((void)SolarPower(-1.0, {1.0, 0.2}), InputError);
}

TEST(SolarTest, EfficiencyWarning)
{
    auto const warnings = ValidateSolarPanel({1.0, 0.35});
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("15-20%"), std::string::npos) << warnings[0];
    EXPECT_TRUE(ValidateSolarPanel({1.0, 0.18}).empty());
    EXPECT_THROW((void)ValidateSolarPanel({1.0, 1.5}), ConfigError);
    EXPECT_THROW((void)ValidateSolarPanel({-1.0, 0.18}), ConfigError);
}

TEST(WindTest, MidpointOfCurve)
{
    EXPECT_DOUBLE_EQ(WindPower(7.5, SimpleTurbine()), 1'500'000.0);
}

TEST(WindTest, CutInAndCutOut)
{
    auto const spec = SimpleTurbine();
    EXPECT_EQ(WindPower(2.9, spec), 0.0);
    EXPECT_EQ(WindPower(25.1, spec), 0.0);
    EXPECT_DOUBLE_EQ(WindPower(20.0, spec), 3'000'000.0);
    EXPECT_THROW((void)WindPower(-0.1, spec), InputError);
}

TEST(WindTest, HeightCorrection)
{
    auto spec = SimpleTurbine();
    EXPECT_EQ(HubHeightWindSpeed(6.3, spec), 6.3);
    spec.hub_height_m = 80.0;
    spec.reference_height_m = 10.0;
    spec.shear_exponent = 1.0 / 7.0;
    EXPECT_DOUBLE_EQ(HubHeightWindSpeed(5.0, spec), 5.0 * std::pow(8.0, 1.0 / 7.0));
}

TEST(WindTest, CurveValidation)
{
    WindTurbineSpec spec = SimpleTurbine();
    spec.power_curve = {};
    EXPECT_THROW(ValidateWindTurbine(spec), ConfigError);
    spec.power_curve = {{5.0, 0.0}, {4.0, 10.0}};
    EXPECT_THROW(ValidateWindTurbine(spec), ConfigError);
    spec = SimpleTurbine();
    spec.cut_out_mps = 2.0;
    EXPECT_THROW(ValidateWindTurbine(spec), ConfigError);
    EXPECT_NO_THROW(ValidateWindTurbine(SimpleTurbine()));
}

TEST(ProducerTest, ConstantTrace)
{
    TraceProducer producer{"p", TimeSeriesTrace{{{Epoch(0), 500.0}}, Interpolation::Hold, 1.0, true}};
    StepContext ctx;
    for (int i = 0; i < 10; ++i)
    {
        ctx.time = Epoch(60 * i);
        EXPECT_EQ(producer.PowerW(ctx), 500.0);
    }
    EXPECT_EQ(producer.Category(), "other");
}

TEST(ProducerTest, ZeroScale)
{
    TraceProducer producer{
        "p", TimeSeriesTrace{{{Epoch(0), 500.0}, {Epoch(60), 700.0}}, Interpolation::Linear, 0.0}};
    StepContext ctx;
    ctx.time = Epoch(30);
    EXPECT_EQ(producer.PowerW(ctx), 0.0);
}

TEST(ProducerTest, NegativePowerNamesTrace)
{
    TraceProducer producer{
        "p", TimeSeriesTrace{{{Epoch(0), -5.0}}, Interpolation::Hold, 1.0, true, Unit::Watts, "pv.csv"}};
    StepContext ctx;
    try
    {
        (void)producer.PowerW(ctx);
        FAIL();
    }
    catch (InputError const& e)
    {
        EXPECT_NE(std::string{e.what()}.find("pv.csv"), std::string::npos) << e.what();
    }
}

TEST(ProducerTest, SolarAndWindCategories)
{
    SolarProducer solar{"pv", {2.0, 0.18}, TimeSeriesTrace{{{Epoch(0), 850.0}}, Interpolation::Hold, 1.0, true}};
    WindProducer wind{"wt", SimpleTurbine(), TimeSeriesTrace{{{Epoch(0), 7.5}}, Interpolation::Hold, 1.0, true}};
    StepContext ctx;
    EXPECT_DOUBLE_EQ(solar.PowerW(ctx), 306.0);
    EXPECT_DOUBLE_EQ(wind.PowerW(ctx), 1'500'000.0);
    EXPECT_EQ(solar.Category(), "solar");
    EXPECT_EQ(wind.Category(), "wind");
}

// Replays a solar profile file and compares every step against a
// hand-rolled reader and interpolator.
TEST(ProducerTest, SolarReplayMatchesResamplingOracle)
{
    gridloop::testing::TempDir dir;
    std::string csv = "time,irr\n";
    std::vector<std::pair<long long, double>> raw;
    for (int h = 0; h <= 24; ++h)
    {
        double const v = (h >= 6 && h <= 18) ? 900.0 * std::sin(M_PI * (h - 6) / 12.0) : 0.0;
        raw.emplace_back(h * 3600LL, v);
        csv += fmt::format("{},{}\n", h * 3600, v);
    }
    auto path = dir.Write("irr.csv", csv);
    SolarPanelSpec const panel{40.0, 0.18};
    SolarProducer producer{
        "pv", panel, LoadTrace(path, {}, {Unit::WattsPerSquareMeter, Interpolation::Linear})};

    // Independent oracle: parse the file again with iostreams.
    std::ifstream in{path};
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<long long, double>> oracle_points;
    while (std::getline(in, line))
    {
        auto comma = line.find(',');
        oracle_points.emplace_back(std::stoll(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    ASSERT_EQ(oracle_points.size(), raw.size());

    StepContext ctx;
    for (long long t = 0; t < 86400; t += 60)
    {
        std::size_t k = static_cast<std::size_t>(t / 3600);
        auto [t0, v0] = oracle_points[k];
        auto [t1, v1] = oracle_points[k + 1];
        double const irr = v0 + (v1 - v0) * double(t - t0) / double(t1 - t0);
        ctx.time = Epoch(t);
        EXPECT_TRUE(gridloop::testing::NearRel(producer.PowerW(ctx), irr * panel.area_m2 * panel.efficiency, 1e-12))
            << "t=" << t;
    }
}

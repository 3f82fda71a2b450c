#include <gtest/gtest.h>

#include "taxisfv/config.hpp"
#include "taxisfv/presets.hpp"

using namespace taxisfv;

TEST(Config, ParameterSetPIsBitExact) {
    const UpaParameters p = preset_config(PresetId::I).upa;
    EXPECT_EQ(p.D_c, 3.5e-4);
    EXPECT_EQ(p.D_u, 2.5e-3);
    EXPECT_EQ(p.D_p, 3.5e-3);
    EXPECT_EQ(p.D_m, 4.91e-3);
    EXPECT_EQ(p.chi_u, 3.05e-2);
    EXPECT_EQ(p.chi_p, 3.75e-2);
    EXPECT_EQ(p.chi_v, 2.85e-2);
    EXPECT_EQ(p.mu_1, 0.25);
    EXPECT_EQ(p.mu_2, 0.15);
    EXPECT_EQ(p.delta, 8.15);
    EXPECT_EQ(p.alpha_3, 0.215);
    EXPECT_EQ(p.alpha_4, 0.5);
    EXPECT_EQ(p.alpha_5, 0.5);
    EXPECT_EQ(p.phi_13, 0.0);
    EXPECT_EQ(p.phi_21, 0.75);
    EXPECT_EQ(p.phi_22, 0.55);
    EXPECT_EQ(p.phi_31, 0.75);
    EXPECT_EQ(p.phi_33, 0.3);
    EXPECT_EQ(p.phi_41, 0.75);
    EXPECT_EQ(p.phi_42, 0.55);
    EXPECT_EQ(p.phi_51, 0.0);
    EXPECT_EQ(p.phi_52, 0.11);
    EXPECT_EQ(p.phi_53, 0.75);
}

TEST(Config, PresetDefaults) {
    EXPECT_EQ(preset_config(PresetId::II).upa.D_c, 5.3e-3);
    const RunConfig i = preset_config(PresetId::I);
    EXPECT_EQ(i.epsilon, 5e-3);
    EXPECT_EQ(i.cfl, 0.49);
    EXPECT_EQ(preset_config(PresetId::I, true).t_end, 60.0);
    const RunConfig r = preset_config(PresetId::Reduced);
    EXPECT_EQ(r.reduced.D_c, 5.25e-3);
    EXPECT_EQ(r.reduced.chi, 0.04);
    EXPECT_EQ(r.saturation.value_or(0.0), 0.01);
    for (PresetId id : {PresetId::I, PresetId::II, PresetId::TwoD, PresetId::Reduced}) {
        EXPECT_NO_THROW(preset_config(id).validate()) << preset_name(id);
        EXPECT_NO_THROW(preset_config(id, true).validate()) << preset_name(id);
        EXPECT_EQ(parse_preset(preset_name(id)), id);
    }
}

TEST(Config, ParsesKeyValueText) {
    const auto kv = parse_key_values("# comment\n  cells = 400  \nmethod=IMEX2 # trailing\n\nt_end = 3.5\n");
    ASSERT_EQ(kv.size(), 3u);
    EXPECT_EQ(kv.at("cells"), "400");
    EXPECT_EQ(kv.at("method"), "IMEX2");
    RunConfig c;
    apply_settings(c, kv);
    EXPECT_EQ(c.cells, 400u);
    EXPECT_EQ(c.method, Method::Imex2);
    EXPECT_EQ(c.t_end, 3.5);
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW((void)parse_key_values("cells = 1\ncells = 2\n"), ConfigError);
    EXPECT_THROW((void)parse_key_values("just words\n"), ConfigError);
    EXPECT_THROW((void)parse_key_values(" = 3\n"), ConfigError);
    RunConfig c;
    EXPECT_THROW(apply_setting(c, "cells", "many"), ConfigError);
    EXPECT_THROW(apply_setting(c, "cells", "-4"), ConfigError);
    EXPECT_THROW(apply_setting(c, "method", "RK45"), ConfigError);
    EXPECT_THROW(apply_setting(c, "preset", "III"), ConfigError);
    EXPECT_THROW(apply_setting(c, "no_such_key", "1"), ConfigError);
    EXPECT_THROW(apply_setting(c, "amr", "maybe"), ConfigError);
    EXPECT_THROW(apply_setting(c, "parameter_set", "Q"), ConfigError);
    EXPECT_THROW((void)read_key_value_file("/nonexistent/run.cfg"), ConfigError);
}

TEST(Config, ValidationCatchesInconsistentValues) {
    RunConfig c;
    c.cfl = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = RunConfig{};
    c.cfl = 1.2;
    EXPECT_THROW(c.validate(), ConfigError);
    c = RunConfig{};
    c.upa.D_c = -1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = RunConfig{};
    c.saturation = 0.1;  // uPA preset
    EXPECT_THROW(c.validate(), ConfigError);
    c = preset_config(PresetId::TwoD);
    c.amr = true;
    EXPECT_THROW(c.validate(), ConfigError);
    c = RunConfig{};
    c.amr_config.monitor.c_coa = 60.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, PresetKeyResetsBeforeOtherKeys) {
    RunConfig c;
    apply_settings(c, {{"preset", "REDUCED"}, {"chi", "0.05"}, {"S", "0.02"}});
    EXPECT_EQ(c.preset, PresetId::Reduced);
    EXPECT_EQ(c.reduced.chi, 0.05);
    EXPECT_EQ(*c.saturation, 0.02);
    // uPA symbols do not exist in the reduced model.
    EXPECT_THROW(apply_setting(c, "phi_21", "1"), ConfigError);
}

TEST(Config, MonitorKindSetsThresholdsBeforeOverrides) {
    RunConfig c;
    apply_settings(c, {{"monitor", "velocity_error"}, {"c_ref", "1e-3"}});
    EXPECT_EQ(c.amr_config.monitor.kind, MonitorKind::VelocityError);
    EXPECT_EQ(c.amr_config.monitor.c_ref, 1e-3);
    EXPECT_EQ(c.amr_config.monitor.c_coa, 4e-4);
}

TEST(Config, EntriesEchoEverySetting) {
    const auto e = config_entries(preset_config(PresetId::I));
    auto find = [&](const std::string& k) -> const ConfigValue* {
        for (const auto& [key, v] : e)
            if (key == k) return &v;
        return nullptr;
    };
    ASSERT_NE(find("delta"), nullptr);
    EXPECT_EQ(std::get<double>(*find("delta")), 8.15);
    EXPECT_EQ(std::get<std::string>(*find("method")), "IMEX3");
    EXPECT_EQ(std::get<double>(*find("cfl")), 0.49);
    EXPECT_EQ(std::get<long long>(*find("cells")), 2000);
    // Round trip through apply_setting.
    RunConfig c;
    for (const auto& [key, v] : e) {
        if (key == "preset" || key == "paper_scale") continue;
        std::string text;
        if (const auto* d = std::get_if<double>(&v)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", *d);
            text = buf;
        } else if (const auto* b = std::get_if<bool>(&v)) {
            text = *b ? "true" : "false";
        } else if (const auto* i = std::get_if<long long>(&v)) {
            text = std::to_string(*i);
        } else {
            text = std::get<std::string>(v);
        }
        if (text.empty()) continue;
        apply_setting(c, key, text);
    }
    EXPECT_EQ(config_entries(c), e);
}

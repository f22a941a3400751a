#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "kmixup/kmixup.hpp"

using namespace kmixup;

TEST(Checkpoint, RoundTripIsExact) {
    MlpModel m = init_mlp({3, 5, 4, 2}, 1);
    m.biases[1](2) = -0.1234567890123456789;
    m.class_names = {"inner", "outer"};
    const auto path = std::filesystem::temp_directory_path() / "kmixup_ckpt_test.json";
    save_checkpoint(m, path.string());
    const MlpModel back = load_checkpoint(path.string());
    std::filesystem::remove(path);
    EXPECT_EQ(back.layer_sizes, m.layer_sizes);
    EXPECT_EQ(back.class_names, m.class_names);
    for (std::size_t l = 0; l < m.num_layers(); ++l) {
        EXPECT_EQ(back.weights[l], m.weights[l]);
        EXPECT_EQ(back.biases[l], m.biases[l]);
    }
}

TEST(Checkpoint, WeightsAreRowMajor) {
    MlpModel m = MlpModel::zeros({2, 2});
    m.weights[0] << 1, 2, 3, 4;
    const json j = checkpoint_json(m);
    EXPECT_EQ(j["weights"][0], json({1.0, 2.0, 3.0, 4.0}));
    EXPECT_EQ(j["layer_sizes"], json({2, 2}));
}

TEST(Checkpoint, MalformedInputs) {
    json j = checkpoint_json(MlpModel::zeros({2, 3}));
    j["weights"][0].push_back(1.0);
    EXPECT_THROW(model_from_json(j), ShapeError);
    EXPECT_THROW(model_from_json(json{{"layer_sizes", {2, 3}}}), InputError);
    EXPECT_THROW(load_checkpoint("/nonexistent/model.json"), IoError);
}

TEST(ReportJson, MatchStatsFields) {
    const MatchStats st = cross_cluster_stats(two_cluster_spec(2, 4.0, 1.0, 1.0), 8, 3, 1);
    const json j = st;
    for (const char* key : {"k", "trials", "cross_cluster_fraction", "per_trial_counts", "match_lengths"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["per_trial_counts"].size(), 3u);
}

TEST(ReportJson, DegenerateSlopeIsNull) {
    ScalingReport r;
    r.ks = {2, 4};
    r.mean_w2sq = {0.0, 0.0};
    r.degenerate = true;
    const json j = r;
    EXPECT_TRUE(j["fitted_slope"].is_null());
    EXPECT_TRUE(j["degenerate"].get<bool>());
}

TEST(ReportCsv, MetricsHeaderAndRows) {
    std::ostringstream out;
    write_metrics_csv({{0, 0.5, 0.75}, {1, 0.25, 1.0}}, out);
    EXPECT_EQ(out.str(), "epoch,train_loss,test_acc\n0,0.5,0.75\n1,0.25,1\n");
}

TEST(AlignClasses, RemapsToCheckpointOrder) {
    std::istringstream in("x,label\n1,b\n2,a\n");
    const Dataset d = parse_csv(in);
    const Dataset aligned = align_classes(d, {"a", "b"});
    EXPECT_EQ(aligned.class_of(0), 1u);
    EXPECT_EQ(aligned.class_of(1), 0u);
    EXPECT_THROW(align_classes(d, {"a", "c"}), InputError);
}

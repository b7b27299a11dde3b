#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_support.h"
#include "texturecrop/error.h"
#include "texturecrop/manifest.h"

namespace texturecrop {
namespace {

TEST(DatasetManifest, ParsesCsvWithQuotes) {
  std::istringstream in(
      "path,label,subset\n"
      "img/a.png,1,\"DALL-E 2\"\n"
      "\"img/b, c.png\",0,real-pool\n"
      "\n");
  const auto m = parse_dataset_manifest(in, false, "/data");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].subset, "DALL-E 2");
  EXPECT_EQ(m.entries[0].label, 1);
  EXPECT_EQ(m.entries[0].image_id, "img_a");
  EXPECT_EQ(m.entries[1].path, "img/b, c.png");
  EXPECT_EQ(m.entries[1].image_id, "img_b__c");
  EXPECT_EQ(m.resolve(m.entries[0]), std::filesystem::path("/data/img/a.png"));
}

TEST(DatasetManifest, ParsesJsonLines) {
  std::istringstream in(
      R"({"path":"x/1.png","label":1,"subset":"SITD"})"
      "\n"
      R"({"path":"/abs/2.tif","label":"0","subset":"SITD"})"
      "\n");
  const auto m = parse_dataset_manifest(in, true, "/base");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[1].label, 0);
  EXPECT_EQ(m.resolve(m.entries[1]), std::filesystem::path("/abs/2.tif"));
  EXPECT_EQ(m.entries[1].image_id, "abs_2");
}

TEST(DatasetManifest, RejectsBadRows) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_dataset_manifest(in, false);
  };
  EXPECT_THROW(parse("path,label\na.png,2\n"), FormatError);
  EXPECT_THROW(parse("file,label\na.png,1\n"), FormatError);
  EXPECT_THROW(parse("path,label\na.png,1\na.png,0\n"), FormatError);
  // Distinct paths, same derived id.
  EXPECT_THROW(parse("path,label\na.png,1\na.jpg,0\n"), FormatError);
  EXPECT_THROW(parse("path,label,subset\na.png\n"), FormatError);
}

TEST(ImageId, SanitizesPaths) {
  EXPECT_EQ(image_id_from_path("foo.png"), "foo");
  EXPECT_EQ(image_id_from_path("./sub dir/x.y.png"), "sub_dir_x.y");
  EXPECT_EQ(image_id_from_path("/abs/p.tiff"), "abs_p");
}

TEST(CropManifest, RoundTripsRecords) {
  std::mt19937 rng(61);
  std::vector<CropSet> sets;
  for (int i = 0; i < 5; ++i) {
    CropperConfig cfg;
    cfg.window = 16;
    cfg.stride = 10;
    cfg.method = i % 2 ? CropMethod::TenCrop : CropMethod::TextureCrop;
    sets.push_back(plan_crops(testing::noise_image(40, 33, rng), cfg, "im" + std::to_string(i)));
  }
  CropperConfig resize_cfg;
  resize_cfg.method = CropMethod::Resize;
  sets.push_back(plan_crops(testing::noise_image(50, 40, rng), resize_cfg, "rs"));

  std::stringstream buf;
  write_crop_manifest(buf, sets);
  const auto back = read_crop_manifest(buf);
  ASSERT_EQ(back.size(), sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    ASSERT_EQ(back[i].records.size(), sets[i].records.size());
    for (std::size_t k = 0; k < sets[i].records.size(); ++k) {
      const auto& a = sets[i].records[k];
      const auto& b = back[i].records[k];
      EXPECT_EQ(a.crop_id, b.crop_id);
      EXPECT_EQ(a.image_id, b.image_id);
      EXPECT_EQ(a.rect, b.rect);
      EXPECT_EQ(a.metric.kind, b.metric.kind);
      EXPECT_EQ(a.metric.value, b.metric.value);
      EXPECT_EQ(a.flipped, b.flipped);
      EXPECT_EQ(a.fallback, b.fallback);
      EXPECT_EQ(a.resize_to, b.resize_to);
    }
  }
}

TEST(CropManifest, LineSchema) {
  CropSet set;
  set.image_id = "a";
  CropRecord r;
  r.image_id = "a";
  r.crop_id = "a_0_0";
  r.rect = {0, 0, 224, 224};
  r.metric = {TextureMetricKind::SD, 0.25};
  r.fallback = true;
  set.records.push_back(r);
  std::ostringstream out;
  write_crop_manifest(out, std::span<const CropSet>(&set, 1));
  EXPECT_EQ(out.str(),
            R"({"image_id":"a","crop_id":"a_0_0","x":0,"y":0,"w":224,"h":224,)"
            R"("metric_kind":"sd","metric_value":0.25,"flipped":false,"fallback":true})"
            "\n");
}

TEST(ScoreManifest, RoundTripAndErrors) {
  const std::vector<ScoreRecord> s = {{"a_0_0", 0.125}, {"a_200_0", 1.0 / 3.0}};
  std::stringstream buf;
  write_score_manifest(buf, s);
  const auto back = read_score_manifest(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].score, 1.0 / 3.0);
  std::istringstream bad(R"({"crop_id":"a"})");
  EXPECT_THROW(read_score_manifest(bad), FormatError);
  std::istringstream junk("not json\n");
  EXPECT_THROW(read_score_manifest(junk), FormatError);
}

TEST(AggregatedManifest, RoundTrip) {
  const std::vector<AggregatedScore> a = {{"x", 0.5, 3, "average"},
                                          {"y", 0.238, 3, "weighted_average(0.1)"}};
  std::stringstream buf;
  write_aggregated_manifest(buf, a);
  const auto back = read_aggregated_manifest(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].method, "weighted_average(0.1)");
  EXPECT_EQ(back[1].n_crops, 3u);
  EXPECT_EQ(back[1].score, 0.238);
}

}  // namespace
}  // namespace texturecrop

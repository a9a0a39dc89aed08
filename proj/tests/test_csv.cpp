#include <gtest/gtest.h>

#include <sstream>

#include "fcost/csv.hpp"

using namespace fcost;

TEST(Csv, SplitsQuotedFields) {
  const auto cells = csv::split_record(R"(a, "b,c" ,"say ""hi""",)");
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0], "a");
  EXPECT_EQ(cells[1], "b,c");
  EXPECT_EQ(cells[2], "say \"hi\"");
  EXPECT_EQ(cells[3], "");
}

TEST(Csv, ParseSkipsCommentsAndBlankLinesButKeepsLineNumbers) {
  std::istringstream in("name,value\n# note\n\nx,1\ny,2\n");
  const auto t = csv::parse(in);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].line, 4u);
  EXPECT_EQ(t.rows[1].cells[t.column("value", "mem")], "2");
  EXPECT_TRUE(t.has_column("name"));
  EXPECT_FALSE(t.has_column("other"));
  EXPECT_THROW(t.column("other", "mem"), SchemaError);
}

TEST(Csv, EscapeRoundTrips) {
  for (std::string s : {"plain", "a,b", "quote\"d", "x,\"y\",z"}) {
    const auto cells = csv::split_record(csv::escape(s) + ",tail");
    ASSERT_EQ(cells.size(), 2u);
    EXPECT_EQ(cells[0], s);
  }
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
}

TEST(Csv, MissingFileIsIoError) { EXPECT_THROW(csv::read_file("/nonexistent/file.csv"), IoError); }

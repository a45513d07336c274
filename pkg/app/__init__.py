"""pmd-penalty - 一阶 PMD 功率代价仿真."""

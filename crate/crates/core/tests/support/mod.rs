pub mod bell_oracle;
pub mod herald_oracle;

pub mod vertex_oracle;

use mslab_core::universal;

fn main() {
    for n in [4096u64, 65536] {
        let v = universal::normalized_redundancy_binary(n);
        println!("binary n={n}: value={v:.6} |v-0.5|={:.6}", (v - 0.5).abs());
    }
    for n in [64u64, 128, 256] {
        let v = universal::empirical_redundancy_ratio(3, n).unwrap();
        println!("ternary n={n}: ratio={v:.6} |v-1.0|={:.6}", (v - 1.0).abs());
    }
}

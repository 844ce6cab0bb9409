//! Frame constructions: fans, spy-chains, delta-products, disjoint unions
//! with a spy-point, and property checks.
//!
//! ```bash
//! cargo run -p dmw --example frames_and_products
//! ```

use dmw::frames::{delta_product, diag_uniqueness, disjoint_union_with_spy, Frame};

fn main() {
    let fan = Frame::fan(4).unwrap();
    println!("fan(4):        {}", fan.to_json());
    println!("  properties:  {:?}", fan.properties());

    let chain = Frame::spy_chain(3).unwrap();
    println!("spy_chain(3):  {}", chain.to_json());
    println!(
        "  spy {} has out-degree {}",
        Frame::spy_of_chain(3),
        chain.out_degree(&Frame::spy_of_chain(3))
    );

    let product = delta_product(&chain, &fan);
    println!(
        "product:       {} worlds, {} horizontal edges, {} diagonal points",
        product.worlds().len(),
        product.rh().len(),
        product.diag().len()
    );
    println!("  diagonal hits rows/columns at most once: {}", diag_uniqueness(&product).unwrap());
    println!("  rooted at: {:?}", product.root().map(|w| w.to_string()));

    let union = disjoint_union_with_spy(&[fan.clone(), fan]).unwrap();
    println!(
        "union + spy:   {} worlds, {} edges",
        union.worlds().len(),
        union.rel().len()
    );
}

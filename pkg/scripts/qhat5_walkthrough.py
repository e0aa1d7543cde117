"""Print every stage of the order-five numerator derivation.

The numerator is forced by one non-toric relation among the level-five
basic relations: the difference of its two monomial halves factors
through the toric weight, and the quotient times the relation's own
weight is the numerator the residue formula needs.
"""

from thomcalc import basic_relations, qhat, qhat5_derivation_steps


def main() -> None:
    relations = [rel for rel in basic_relations(5) if rel.level == 5]
    print("level-5 basic relations:")
    for rel in relations:
        kind = "toric" if rel.toric else "non-toric"
        print(f"  {rel.label()}  [{kind}]")

    steps = qhat5_derivation_steps()
    print()
    print("row products:")
    for product in steps.row_products:
        print(f"  {product.to_text()}")
    print(f"difference:     {steps.difference.to_text()}")
    print(f"toric divisor:  {steps.divisor.to_text()}")
    print(f"quotient:       {steps.toric_quotient.to_text()}")
    print(f"weight factor:  {steps.weight_factor.to_text()}")
    print(f"numerator:      {steps.result.to_text()}")
    assert steps.result == qhat(5)
    print()
    print("matches the registry entry for order five")


if __name__ == "__main__":
    main()

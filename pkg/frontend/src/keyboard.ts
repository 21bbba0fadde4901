/** Keyboard bindings: a full session is drivable without the mouse.
 *
 *   ArrowDown / j   move to the next item
 *   ArrowUp / k     move to the previous item
 *   1..9            pick that palette class for the current item (override)
 *   a               accept the current item (revert its override)
 *   Shift+A         accept all
 *   Enter           submit the current grid
 */

export type KeyIntent =
  | { type: "move"; delta: 1 | -1 }
  | { type: "pick"; paletteIndex: number }
  | { type: "accept" }
  | { type: "acceptAll" }
  | { type: "submit" };

export function intentForKey(key: string, shift = false): KeyIntent | null {
  switch (key) {
    case "ArrowDown":
    case "j":
      return { type: "move", delta: 1 };
    case "ArrowUp":
    case "k":
      return { type: "move", delta: -1 };
    case "Enter":
      return { type: "submit" };
    case "a":
      return { type: "accept" };
    case "A":
      return shift ? { type: "acceptAll" } : { type: "accept" };
    default: {
      if (key.length === 1 && key >= "1" && key <= "9") {
        return { type: "pick", paletteIndex: Number(key) - 1 };
      }
      return null;
    }
  }
}

/** Cursor over a fixed-size grid, clamped to its bounds. */
export class GridCursor {
  private position = 0;

  constructor(private readonly size: number) {}

  get index(): number {
    return this.position;
  }

  move(delta: number): number {
    this.position = Math.min(Math.max(this.position + delta, 0), Math.max(this.size - 1, 0));
    return this.position;
  }
}

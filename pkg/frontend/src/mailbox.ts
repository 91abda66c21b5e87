/**
 * Latest-wins mailbox: network events queue per message type, and the render
 * loop drains at most one value per type per tick. Stale frames are dropped,
 * never queued unboundedly.
 */

export class Mailbox<T extends { type: string }> {
  private slots = new Map<string, T>();

  put(msg: T): void {
    this.slots.set(msg.type, msg);
  }

  /** Remove and return the newest message of one type, if any. */
  take(type: T["type"]): T | undefined {
    const value = this.slots.get(type);
    if (value !== undefined) this.slots.delete(type);
    return value;
  }

  peek(type: T["type"]): T | undefined {
    return this.slots.get(type);
  }

  clear(): void {
    this.slots.clear();
  }

  get size(): number {
    return this.slots.size;
  }
}

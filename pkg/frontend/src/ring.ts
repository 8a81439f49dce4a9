/** Fixed-capacity ring buffer; push drops the oldest entry once full. */

export class RingBuffer<T> {
  private readonly slots: (T | undefined)[];
  private head = 0;
  private count = 0;

  constructor(readonly capacity: number) {
    if (!Number.isInteger(capacity) || capacity <= 0) {
      throw new RangeError("capacity must be a positive integer");
    }
    this.slots = new Array<T | undefined>(capacity);
  }

  push(value: T): void {
    if (this.count < this.capacity) {
      this.slots[(this.head + this.count) % this.capacity] = value;
      this.count += 1;
    } else {
      this.slots[this.head] = value;
      this.head = (this.head + 1) % this.capacity;
    }
  }

  get length(): number {
    return this.count;
  }

  /** i = 0 is the oldest retained entry. */
  get(i: number): T {
    if (!Number.isInteger(i) || i < 0 || i >= this.count) {
      throw new RangeError(`index ${i} out of range for length ${this.count}`);
    }
    return this.slots[(this.head + i) % this.capacity] as T;
  }

  get latest(): T | undefined {
    return this.count === 0 ? undefined : this.get(this.count - 1);
  }

  toArray(): T[] {
    const out = new Array<T>(this.count);
    for (let i = 0; i < this.count; i++) out[i] = this.get(i);
    return out;
  }

  clear(): void {
    this.head = 0;
    this.count = 0;
    this.slots.fill(undefined);
  }
}
